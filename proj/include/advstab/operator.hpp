#pragma once

#include <advstab/grid.hpp>
#include <advstab/profile.hpp>

#include <iosfwd>
#include <span>
#include <vector>

namespace advstab {

/// Tridiagonal finite-volume discretisation of
///
///     L φ = d φ'' - q φ' + h(x) φ      on (0,1),
///     d φ'(0) - q φ(0) = 0,  φ'(1) = 0,
///
/// written in flux form L φ = F' + hφ with F = dφ' - qφ. Interface fluxes
/// use the exponentially fitted (Scharfetter-Gummel) form
///
///     F_{i+1/2} = (d/Δx) [ B(z) φ_{i+1} - B(-z) φ_i ],  z = qΔx/d,  B(z) = z/(e^z - 1),
///
/// which is the centred second-order flux plus O(z²) and keeps the operator
/// a Z-matrix at every cell Péclet number. The inflow flux F_{-1/2} is zero
/// exactly; the outflow flux uses a mirrored ghost cell, F_{n-1/2} = -q φ_{n-1}.
class DiscreteOperator {
public:
    DiscreteOperator(double d, double q, std::span<const double> h, const Grid& grid);

    double diffusion() const noexcept { return d_; }
    double advection() const noexcept { return q_; }
    int size() const noexcept { return static_cast<int>(diag_.size()); }
    double dx() const noexcept { return dx_; }

    std::span<const double> potential() const noexcept { return h_; }
    /// lower()[i] couples row i to column i-1 (lower()[0] is unused, zero).
    std::span<const double> lower() const noexcept { return lower_; }
    std::span<const double> diag() const noexcept { return diag_; }
    /// upper()[i] couples row i to column i+1 (upper()[n-1] is unused, zero).
    std::span<const double> upper() const noexcept { return upper_; }

    /// y = A x, evaluated through the interface fluxes.
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// A + c I.
    DiscreteOperator shifted(double c) const;

    double gershgorin_upper() const;
    double inf_norm() const;

    /// Sparse triplets "row,col,value", one per stored nonzero.
    void write_csv(std::ostream& os) const;

private:
    double d_;
    double q_;
    double dx_;
    double flux_plus_;   // (d/Δx) B(z)
    double flux_minus_;  // (d/Δx) B(-z)
    std::vector<double> h_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

/// B(z) = z / (e^z - 1), with B(0) = 1.
double bernoulli(double z);

DiscreteOperator assemble(double d, double q, const Profile& h, const Grid& grid);
DiscreteOperator assemble(double d, double q, std::span<const double> h, const Grid& grid);

}  // namespace advstab
