#pragma once

#include <advstab/eigensolver.hpp>
#include <advstab/roots.hpp>
#include <advstab/steady.hpp>

#include <optional>
#include <string>
#include <vector>

namespace advstab {

/// Log-spaced samples from lo to hi inclusive.
std::vector<double> log_range(double lo, double hi, int count);

/// The μ range used for γ₃ and the structural roots: [1e-3, 1e4], 41 points.
std::vector<double> default_mu_range();

struct EtaSample {
    double mu = 0.0;
    double integral = 0.0;  // ∫η
    double maximum = 0.0;   // max η
};

/// η at every μ, solved independently (in parallel when jobs > 1).
std::vector<EtaSample> scan_eta(const Habitat& hab, const std::vector<double>& mus, int jobs = 1);

struct GammaThresholds {
    double b = 0.0;
    double gamma1 = 0.0;  // b∫K
    double gamma2 = 0.0;  // b∫r/∫(r/K)
    double gamma3 = 0.0;  // b sup_μ ∫η
    double gamma4 = 0.0;  // b max K
    std::vector<EtaSample> mu_grid_used;
    /// Maximiser of the scan after golden-section refinement, and b∫η there.
    double gamma3_mu = 0.0;
    double gamma3_scan = 0.0;
    /// b∫η at the two ends of the scan (truncation bias of the sup).
    double gamma3_low_end = 0.0;
    double gamma3_high_end = 0.0;
    /// True when the sup is attained by one of the limits μ → 0 or μ → ∞
    /// rather than inside the scanned range.
    bool gamma3_from_limit = false;
};

/// γ₁, γ₂, γ₄ from Simpson quadrature of the profiles; γ₃ from the scan of
/// ∫η refined by golden section and compared with the two limits.
GammaThresholds gamma_thresholds(double b, const Habitat& hab, const std::vector<double>& mu_range, int jobs = 1);

enum class Regime { I, II, III, IV, V, Boundary };

const char* regime_name(Regime r);

inline constexpr double regime_tolerance = 1e-9;

/// I: γ ≤ γ₁; II: γ₁ < γ < γ₂; III: γ₂ < γ < γ₃; IV: γ₃ < γ < γ₄; V: γ ≥ γ₄.
/// Within 1e-9 of γ₂ or γ₃ the tag is Boundary; γ₁ and γ₄ are inclusive.
Regime gamma_regime(double gamma, const GammaThresholds& t);

struct LambdaSample {
    double mu = 0.0;
    bool defined = false;
    double value = 0.0;
};

struct StructuralRoots {
    /// Smallest and largest roots of b∫η = γ (μ_* and μ^*).
    RootCertificate mu_star_small;
    RootCertificate mu_star;
    int integral_sign_changes = 0;
    /// Root of b max η = γ.
    RootCertificate mu_hat;
    int maximum_sign_changes = 0;
    /// 1/sup λ* over 0 < μ ≤ μ^* (over all scanned μ when μ^* is absent).
    std::optional<double> nu_star;
    double sup_lambda = 0.0;
    double sup_lambda_mu = 0.0;
    /// 1/inf λ* over 0 < μ < μ̂ (scan capped at μ̂ - 1e-3).
    std::optional<double> nu_hat;
    double inf_lambda = 0.0;
    double inf_lambda_mu = 0.0;
    std::vector<EtaSample> eta_table;
    std::vector<LambdaSample> lambda_table;
};

struct RootOptions {
    /// Bracket width target, relative to max(1, μ).
    double width = 1e-6;
    int jobs = 1;
    /// Compute λ* on the scan and derive ν*, ν̂.
    bool lambda_scan = true;
};

StructuralRoots structural_roots(double b, double gamma, const Habitat& hab, const std::vector<double>& mu_range,
                                 const RootOptions& opts = {});

/// λ*(μ) for the weight bη(μ) - γ.
LambdaStar lambda_star(double mu, double b, double gamma, const SteadyState& eta, const Grid& grid,
                       const LambdaStarOptions& opts = {});
LambdaStar lambda_star(double mu, double b, double gamma, const Habitat& hab, const LambdaStarOptions& opts = {});

}  // namespace advstab
