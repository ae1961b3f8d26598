#pragma once

#include <advstab/grid.hpp>
#include <advstab/operator.hpp>
#include <advstab/profile.hpp>

#include <optional>
#include <span>
#include <vector>

namespace advstab {

/// LogDomain: σ₁ by bisection on the pivot signs of sI - A and φ₁ by inverse
/// iteration in logarithms, used when the eigenvector spans more than the
/// double range (cell Péclet number far above one).
enum class EigenMethod { Dense, InverseIteration, LogDomain };

const char* method_name(EigenMethod m);

/// Principal eigenvalue σ₁ (largest real part) with its positive
/// eigenvector, normalised so that max φ₁ = 1.
struct EigenPair {
    double sigma1 = 0.0;
    std::vector<double> phi1;
    /// ‖Aφ₁ - σ₁φ₁‖_∞
    double residual = 0.0;
    EigenMethod method = EigenMethod::InverseIteration;
    int iterations = 0;
};

struct EigenOptions {
    int max_iterations = 500;
    /// Stop when ‖φ_{k+1} - φ_k‖_∞ drops below this.
    double increment_tolerance = 1e-12;
    /// Residual audit: ‖Aφ - σφ‖_∞ <= audit * (|σ| + ‖A‖_∞).
    double residual_audit = 1e-10;
    /// Compare against a dense solve (only done for n <= dense_limit).
    bool dense_cross_check = true;
    int dense_limit = 256;
};

/// Shifted inverse iteration. The shift starts at the Gershgorin bound + 1
/// and is pulled down towards σ₁ using Collatz-Wielandt bounds, so that
/// sI - A stays a nonsingular M-matrix throughout.
EigenPair principal_eigen(const DiscreteOperator& op, const EigenOptions& opts = {});

/// Dense eigensolve of the symmetrised tridiagonal matrix (D⁻¹AD with
/// off-diagonals √(A(i,i+1)A(i+1,i))). Eigenvector recovered by one
/// inverse-iteration sweep on A itself.
EigenPair principal_eigen_dense(const DiscreteOperator& op);

/// Weighted energy quotient
///
///   [ ∫ e^{-qx/d} (-d ω'² + h ω²) dx - q ω(0)² ] / ∫ e^{-qx/d} ω² dx
///
/// in the discrete form that is exact for the assembled operator: with
/// weights w_i = e^{-q x_i/d}, it equals ωᵀWAω / ωᵀWω. Summation by parts
/// puts it in the form computed here,
///
///   Σ_j -(d/Δx) B(z) w_j e^{-z} (ω_{j+1} - e^z ω_j)² - q w_{n-1} ω_{n-1}² + Δx Σ_i w_i h_i ω_i²,
///
/// which reduces to the continuous quotient as Δx → 0. The supremum over ω
/// is σ₁ of the discrete operator.
double rayleigh_quotient(std::span<const double> omega, const DiscreteOperator& op);

double sigma1(double d, double q, const Profile& h, const Grid& grid, const EigenOptions& opts = {});
double sigma1(double d, double q, std::span<const double> h, const Grid& grid, const EigenOptions& opts = {});

/// Principal positive eigenvalue of the Neumann problem ψ'' + λ m(x) ψ = 0
/// with indefinite weight m = bη - γ.
struct LambdaStar {
    double mu = 0.0;
    /// False when m <= 0 everywhere; value and psi are then meaningless.
    bool defined = false;
    double value = 0.0;
    std::vector<double> psi;
    /// Discrete residual ‖ψ'' + λ* m ψ‖_∞ (ψ max-normalised); zero when value = 0.
    double residual = 0.0;
    /// Estimates from the two routes (only set when value > 0).
    double generalized_value = 0.0;
    double bisection_value = 0.0;
    /// Integral of the weight.
    double weight_integral = 0.0;
};

struct LambdaStarOptions {
    /// Run the generalized (dense QZ) route and require agreement.
    bool cross_check = true;
    double agreement = 1e-6;
    /// Initial ν bracket for the σ₁(ν, 0, m) = 0 route.
    double nu_low = 1e-4;
    double nu_high = 1e6;
    /// Width tolerance of |∫m| below which the integral is treated as zero.
    double integral_tolerance = 1e-9;
};

/// λ* for an arbitrary weight sampled on `grid`.
LambdaStar lambda_star_for_weight(std::span<const double> weight, const Grid& grid,
                                  const LambdaStarOptions& opts = {});

/// Smallest positive generalized eigenvalue of K ψ = λ M ψ (stiffness vs.
/// diagonal weight mass) whose eigenvector has ψᵀMψ > 0.
std::optional<double> lambda_star_generalized(std::span<const double> weight, const Grid& grid);

/// Root ν̃ of σ₁(ν̃, 0, m) = 0 by bisection in log ν; returns 1/ν̃.
double lambda_star_bisection(std::span<const double> weight, const Grid& grid, const LambdaStarOptions& opts = {});

}  // namespace advstab
