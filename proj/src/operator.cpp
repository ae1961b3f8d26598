#include <advstab/operator.hpp>

#include <advstab/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace advstab {

double bernoulli(double z) {
    if (std::abs(z) < 1e-10) return 1.0 - 0.5 * z;
    const double den = std::expm1(z);
    if (std::isinf(den)) return 0.0;
    return z / den;
}

DiscreteOperator::DiscreteOperator(double d, double q, std::span<const double> h, const Grid& grid)
    : d_(d), q_(q), dx_(grid.dx()), h_(h.begin(), h.end()) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw InputError("discretization", "diffusion rate must be positive, got " + std::to_string(d));
    }
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw InputError("discretization", "advection rate must be non-negative, got " + std::to_string(q));
    }
    const auto n = static_cast<std::size_t>(grid.size());
    if (h.size() != n) throw InputError("discretization", "potential size does not match grid");

    const double z = q * dx_ / d;
    flux_plus_ = d / dx_ * bernoulli(z);
    flux_minus_ = d / dx_ * bernoulli(-z);
    const double a_plus = flux_plus_ / dx_;
    const double a_minus = flux_minus_ / dx_;

    lower_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // F_{i+1/2} enters row i with +1/Δx and row i+1 with -1/Δx.
        upper_[i] = a_plus;
        diag_[i] -= a_minus;
        diag_[i + 1] -= a_plus;
        lower_[i + 1] = a_minus;
    }
    diag_[n - 1] -= q / dx_;
    for (std::size_t i = 0; i < n; ++i) diag_[i] += h_[i];
}

void DiscreteOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag_.size();
    double flux_left = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double flux_right =
            i + 1 < n ? flux_plus_ * x[i + 1] - flux_minus_ * x[i] : -q_ * x[i];
        y[i] = (flux_right - flux_left) / dx_ + h_[i] * x[i];
        flux_left = flux_right;
    }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    return y;
}

DiscreteOperator DiscreteOperator::shifted(double c) const {
    DiscreteOperator out = *this;
    for (auto& v : out.h_) v += c;
    for (auto& v : out.diag_) v += c;
    return out;
}

double DiscreteOperator::gershgorin_upper() const {
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag_.size(); ++i) {
        bound = std::max(bound, diag_[i] + std::abs(lower_[i]) + std::abs(upper_[i]));
    }
    return bound;
}

double DiscreteOperator::inf_norm() const {
    double norm = 0.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) {
        norm = std::max(norm, std::abs(lower_[i]) + std::abs(diag_[i]) + std::abs(upper_[i]));
    }
    return norm;
}

void DiscreteOperator::write_csv(std::ostream& os) const {
    const auto old_precision = os.precision(17);
    os << "row,col,value\n";
    const std::size_t n = diag_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) os << i << ',' << i - 1 << ',' << lower_[i] << '\n';
        os << i << ',' << i << ',' << diag_[i] << '\n';
        if (i + 1 < n) os << i << ',' << i + 1 << ',' << upper_[i] << '\n';
    }
    os.precision(old_precision);
}

DiscreteOperator assemble(double d, double q, const Profile& h, const Grid& grid) {
    const auto samples = evaluate(h, grid);
    return DiscreteOperator(d, q, samples, grid);
}

DiscreteOperator assemble(double d, double q, std::span<const double> h, const Grid& grid) {
    return DiscreteOperator(d, q, h, grid);
}

}  // namespace advstab
