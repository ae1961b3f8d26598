#pragma once

#include <span>
#include <vector>

namespace advstab {

/// Solves a tridiagonal system with partial pivoting (the dgtsv scheme).
/// Band layout matches DiscreteOperator: lower[i] is A(i,i-1), upper[i] is A(i,i+1).
/// Throws NumericalError on an exactly singular pivot.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// LU factorisation without pivoting, for repeated solves with diagonally
/// dominant matrices (implicit time steps, shifted M-matrices).
class TridiagonalLU {
public:
    TridiagonalLU() = default;
    TridiagonalLU(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper);

    void solve(std::span<const double> rhs, std::span<double> out) const;
    std::vector<double> solve(std::span<const double> rhs) const;

    int size() const noexcept { return static_cast<int>(pivot_.size()); }

private:
    std::vector<double> lower_;
    std::vector<double> pivot_;
    std::vector<double> upper_;
};

}  // namespace advstab
