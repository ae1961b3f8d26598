#include <advstab/tridiagonal.hpp>

#include <advstab/error.hpp>

#include <cmath>
#include <utility>

namespace advstab {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    // dl[i] = A(i+1,i), d[i] = A(i,i), du[i] = A(i,i+1), du2 = fill-in.
    std::vector<double> dl(n > 0 ? n - 1 : 0), d(diag.begin(), diag.end()), du(n > 0 ? n - 1 : 0),
        du2(n, 0.0), b(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        dl[i] = lower[i + 1];
        du[i] = upper[i];
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) throw NumericalError("tridiagonal", "singular matrix");
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            // Swap rows i and i+1.
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= fact * b[i];
        }
    }
    if (n == 0) return b;
    if (d[n - 1] == 0.0) throw NumericalError("tridiagonal", "singular matrix");

    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) {
        b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
    }
    return b;
}

TridiagonalLU::TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                             std::span<const double> upper)
    : lower_(lower.begin(), lower.end()), pivot_(diag.size()), upper_(upper.begin(), upper.end()) {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double p = diag[i];
        if (i > 0) {
            lower_[i] /= pivot_[i - 1];
            p -= lower_[i] * upper_[i - 1];
        }
        if (p == 0.0 || !std::isfinite(p)) throw NumericalError("tridiagonal", "zero pivot in factorisation");
        pivot_[i] = p;
    }
}

void TridiagonalLU::solve(std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = pivot_.size();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = rhs[i] - (i > 0 ? lower_[i] * out[i - 1] : 0.0);
    }
    for (std::size_t i = n; i-- > 0;) {
        out[i] = (out[i] - (i + 1 < n ? upper_[i] * out[i + 1] : 0.0)) / pivot_[i];
    }
}

std::vector<double> TridiagonalLU::solve(std::span<const double> rhs) const {
    std::vector<double> out(rhs.size());
    solve(rhs, out);
    return out;
}

}  // namespace advstab
