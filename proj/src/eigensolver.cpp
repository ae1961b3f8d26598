#include <advstab/eigensolver.hpp>

#include <advstab/error.hpp>
#include <advstab/tridiagonal.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace advstab {

const char* method_name(EigenMethod m) {
    switch (m) {
        case EigenMethod::Dense: return "dense";
        case EigenMethod::InverseIteration: return "inverse-iteration";
        case EigenMethod::LogDomain: return "log-domain";
    }
    return "?";
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void normalize_max(std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    for (auto& x : v) x /= m;
}

/// Factorises sI - A.
TridiagonalLU shifted_factor(const DiscreteOperator& op, double shift) {
    const auto n = static_cast<std::size_t>(op.size());
    std::vector<double> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -op.lower()[i];
        di[i] = shift - op.diag()[i];
        up[i] = -op.upper()[i];
    }
    return TridiagonalLU(lo, di, up);
}

double residual_norm(const DiscreteOperator& op, std::span<const double> v, double sigma) {
    const auto av = op.apply(v);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(av[i] - sigma * v[i]));
    return r;
}

/// Logarithms of the symmetrising scale D (DAD⁻¹ symmetric), built from the
/// stored bands: D_{i+1}/D_i = √(A(i,i+1)/A(i+1,i)).
std::vector<double> log_symmetrizer(const DiscreteOperator& op) {
    const auto n = static_cast<std::size_t>(op.size());
    std::vector<double> logd(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        logd[i + 1] = logd[i] + 0.5 * (std::log(op.upper()[i]) - std::log(op.lower()[i + 1]));
    }
    return logd;
}

/// yᵀTy / yᵀy with y = Dv and T the symmetrised stored matrix, accumulated
/// in extended precision. Quadratically accurate in the eigenvector error
/// and consistent with the dense cross-check.
double eigenvalue_estimate(const DiscreteOperator& op, std::span<const double> v) {
    const auto n = v.size();
    const auto logd = log_symmetrizer(op);
    const auto [lmin, lmax] = std::minmax_element(logd.begin(), logd.end());
    if (*lmax - *lmin > 40.0) {
        // The weights would amplify round-off in the far upstream entries;
        // fall back to the plain quotient vᵀAv / vᵀv on the stored bands.
        long double num = 0.0L;
        long double den = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double av = static_cast<long double>(op.diag()[i]) * v[i];
            if (i > 0) av += static_cast<long double>(op.lower()[i]) * v[i - 1];
            if (i + 1 < n) av += static_cast<long double>(op.upper()[i]) * v[i + 1];
            num += av * v[i];
            den += static_cast<long double>(v[i]) * v[i];
        }
        return static_cast<double>(num / den);
    }
    double anchor = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] != 0.0) anchor = std::max(anchor, logd[i] + std::log(std::abs(v[i])));
    }
    std::vector<long double> y(n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] != 0.0) y[i] = static_cast<long double>(v[i]) * std::exp(static_cast<long double>(logd[i] - anchor));
    }
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        num += y[i] * y[i] * static_cast<long double>(op.diag()[i]);
        if (i + 1 < n) {
            const long double off = std::sqrt(static_cast<long double>(op.upper()[i]) *
                                              static_cast<long double>(op.lower()[i + 1]));
            num += 2.0L * y[i] * y[i + 1] * off;
        }
        den += y[i] * y[i];
    }
    return static_cast<double>(num / den);
}

/// True when sI - A is a nonsingular M-matrix, i.e. s > σ₁: every pivot of
/// the unpivoted LU factorisation is positive.
bool above_spectrum(const DiscreteOperator& op, double s) {
    const auto n = static_cast<std::size_t>(op.size());
    double p = s - op.diag()[0];
    if (!(p > 0.0)) return false;
    for (std::size_t i = 1; i < n; ++i) {
        p = (s - op.diag()[i]) - op.lower()[i] * op.upper()[i - 1] / p;
        if (!(p > 0.0)) return false;
    }
    return true;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symmetrized(const DiscreteOperator& op) {
    const int n = op.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> t =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        t(i, i) = op.diag()[k];
        if (i + 1 < n) {
            using std::sqrt;
            const Scalar off = sqrt(static_cast<Scalar>(op.upper()[k]) * static_cast<Scalar>(op.lower()[k + 1]));
            t(i, i + 1) = off;
            t(i + 1, i) = off;
        }
    }
    return t;
}

/// Extended precision keeps the dense result accurate to well below
/// 1e-10 relative even when ‖A‖ is large.
double symmetrized_top_eigenvalue(const DiscreteOperator& op) {
    using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized<long double>(op), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver", "dense eigensolve failed");
    return static_cast<double>(solver.eigenvalues().maxCoeff());
}


/// log(e^a + e^b)
double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Fallback for eigenvectors that span more than the double range (cell
/// Péclet number far above one). σ₁ is the infimum of {s : sI - A is a
/// nonsingular M-matrix}, found by bisection on the pivot signs. φ₁ comes
/// from inverse iteration carried out in logarithms: with sI - A an
/// M-matrix every term of the LU solve is nonnegative, so the solve is a
/// chain of log-sum-exp updates. Entries below the double range end up 0.
EigenPair log_domain_fallback(const DiscreteOperator& op, const EigenOptions& opts) {
    const auto n = static_cast<std::size_t>(op.size());
    const double eps = std::numeric_limits<double>::epsilon();
    double hi = op.gershgorin_upper() + 1.0;
    double lo = -op.inf_norm() - 1.0;
    for (int it = 0; it < 2000 && hi - lo > 4.0 * eps * std::max(std::abs(lo), std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (above_spectrum(op, mid) ? hi : lo) = mid;
    }
    const double shift = hi + 1e-13 * op.inf_norm();

    // Unpivoted LU of sI - A: pivots p_i > 0, multipliers m_i = A(i,i-1)/p_{i-1} >= 0.
    std::vector<double> log_pivot(n), log_mult(n, -std::numeric_limits<double>::infinity()), log_up(n);
    double p = shift - op.diag()[0];
    log_pivot[0] = std::log(p);
    for (std::size_t i = 1; i < n; ++i) {
        const double m = op.lower()[i] / p;
        p = (shift - op.diag()[i]) - m * op.upper()[i - 1];
        if (!(p > 0.0)) throw NumericalError("eigensolver", "shift fell below the spectrum in the fallback");
        log_mult[i] = m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
        log_pivot[i] = std::log(p);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        log_up[i] = op.upper()[i] > 0.0 ? std::log(op.upper()[i]) : -std::numeric_limits<double>::infinity();
    }

    std::vector<double> lv(n, 0.0), lw(n);
    std::vector<double> v(n, 1.0), w(n);
    int iter = 0;
    bool converged = false;
    while (iter < opts.max_iterations) {
        ++iter;
        lw[0] = lv[0];
        for (std::size_t i = 1; i < n; ++i) lw[i] = log_add(lv[i], log_mult[i] + lw[i - 1]);
        lw[n - 1] -= log_pivot[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) lw[i] = log_add(lw[i], log_up[i] + lw[i + 1]) - log_pivot[i];
        const double top = *std::max_element(lw.begin(), lw.end());
        double increment = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lw[i] -= top;
            w[i] = std::exp(lw[i]);
            increment = std::max(increment, std::abs(w[i] - v[i]));
        }
        std::swap(lv, lw);
        std::swap(v, w);
        if (increment <= opts.increment_tolerance && iter >= 2) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericalError("eigensolver", "log-domain inverse iteration did not converge");

    EigenPair out;
    out.phi1 = std::move(v);
    out.sigma1 = 0.5 * (lo + hi);
    out.iterations = iter;
    out.method = EigenMethod::LogDomain;
    return out;
}

}  // namespace

EigenPair principal_eigen(const DiscreteOperator& op, const EigenOptions& opts) {
    const auto n = static_cast<std::size_t>(op.size());
    double shift = op.gershgorin_upper() + 1.0;
    // Bracket lower <= σ₁ <= upper, tightened by Collatz-Wielandt bounds and
    // by pivot-sign bisection when the bounds alone make slow progress.
    double lower = -std::numeric_limits<double>::infinity();
    double upper = shift;
    std::vector<double> v(n, 1.0);
    std::vector<double> w(n);

    EigenPair out;
    bool converged = false;
    int iter = 0;
    while (iter < opts.max_iterations) {
        ++iter;
        const auto lu = shifted_factor(op, shift);
        lu.solve(v, w);
        if (!all_finite(w)) {
            // Strongly advective cells make the eigenvector span more than
            // the double range; scale the right-hand side down and let the
            // far upstream entries underflow.
            for (auto& x : v) x *= 1e-300;
            lu.solve(v, w);
            if (!all_finite(w)) break;
        }

        // Collatz-Wielandt: lo <= shift - σ₁ <= hi. The lo side needs v > 0
        // everywhere; entries that underflowed to zero void it.
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        bool lo_valid = true;
        bool hi_valid = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] < 0.0) throw NumericalError("eigensolver", "lost positivity in inverse iteration");
            if (!(v[i] > 0.0)) {
                lo_valid = false;
                continue;
            }
            if (!(w[i] > 0.0)) {
                hi_valid = false;
                continue;
            }
            lo = std::min(lo, v[i] / w[i]);
            hi = std::max(hi, v[i] / w[i]);
        }
        normalize_max(w);
        double increment = 0.0;
        for (std::size_t i = 0; i < n; ++i) increment = std::max(increment, std::abs(w[i] - v[i]));
        std::swap(v, w);

        if (increment <= opts.increment_tolerance && iter >= 2) {
            converged = true;
            break;
        }
        if (lo_valid) upper = std::min(upper, shift - lo);
        if (hi_valid) lower = std::max(lower, shift - hi);
        const double guard = 1e-11 * op.inf_norm() + 1e-10 * std::max(1.0, std::abs(upper));
        for (int probe = 0; probe < 4 && upper - lower > 64.0 * guard; ++probe) {
            const double mid = 0.5 * (lower + upper);
            if (above_spectrum(op, mid)) {
                upper = mid;
            } else {
                lower = mid;
            }
        }
        shift = std::min(shift, upper + guard);
    }
    if (converged) {
        out.phi1 = std::move(v);
        out.sigma1 = eigenvalue_estimate(op, out.phi1);
        out.iterations = iter;
        out.method = EigenMethod::InverseIteration;
    } else {
        out = log_domain_fallback(op, opts);
        out.iterations += iter;
    }
    out.residual = residual_norm(op, out.phi1, out.sigma1);

    const double audit = opts.residual_audit * (std::abs(out.sigma1) + op.inf_norm());
    if (out.residual > audit) {
        std::ostringstream os;
        os << "residual audit failed: " << out.residual << " > " << audit;
        throw NumericalError("eigensolver", os.str());
    }

    if (opts.dense_cross_check && op.size() <= opts.dense_limit) {
        const double dense = symmetrized_top_eigenvalue(op);
        const double tol = 1e-9 * std::max(1.0, std::abs(out.sigma1)) + 1e-14 * op.inf_norm();
        if (std::abs(dense - out.sigma1) > tol) {
            std::ostringstream os;
            os.precision(17);
            os << "dense cross-check disagrees: inverse iteration " << out.sigma1 << " vs dense " << dense;
            throw NumericalError("eigensolver", os.str());
        }
    }
    return out;
}

EigenPair principal_eigen_dense(const DiscreteOperator& op) {
    EigenPair out;
    out.sigma1 = symmetrized_top_eigenvalue(op);
    out.method = EigenMethod::Dense;

    // φ = D⁻¹y with D = diag(e^{-q x_i/(2d)}); assembled in logarithms so
    // that steep boundary layers do not overflow.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized<double>(op));
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver", "dense eigensolve failed");
    Eigen::Index top = 0;
    solver.eigenvalues().maxCoeff(&top);
    const Eigen::VectorXd y = solver.eigenvectors().col(top);
    const auto n = static_cast<std::size_t>(op.size());
    const double rate = op.advection() / (2.0 * op.diffusion());
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(y(static_cast<Eigen::Index>(i)));
        logs[i] = a > 0.0 ? std::log(a) + rate * op.dx() * static_cast<double>(i)
                          : -std::numeric_limits<double>::infinity();
    }
    const double top_log = *std::max_element(logs.begin(), logs.end());
    out.phi1.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.phi1[i] = std::exp(logs[i] - top_log);
    out.residual = residual_norm(op, out.phi1, out.sigma1);
    out.iterations = 0;
    return out;
}

double rayleigh_quotient(std::span<const double> omega, const DiscreteOperator& op) {
    const auto n = static_cast<std::size_t>(op.size());
    if (omega.size() != n) throw InputError("eigensolver", "trial function size does not match operator");
    if (max_abs(omega) == 0.0) throw InputError("eigensolver", "trial function is identically zero");

    const double d = op.diffusion();
    const double q = op.advection();
    const double dx = op.dx();
    const double z = q * dx / d;
    const double b_plus = bernoulli(z);
    const double em1 = std::expm1(z);

    // w_i = exp(-z i) up to a common factor, anchored in logarithms so that
    // the largest w_i ω_i² is one.
    double anchor = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (omega[i] != 0.0) anchor = std::max(anchor, -z * static_cast<double>(i) + 2.0 * std::log(std::abs(omega[i])));
    }
    auto root_weight = [&](std::size_t i) { return std::exp(0.5 * (-z * static_cast<double>(i) - anchor)); };

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = omega[i] == 0.0 ? 0.0 : root_weight(i) * omega[i];
        num += dx * op.potential()[i] * s * s;
        den += dx * s * s;
        if (i + 1 < n) {
            // w_j e^{-z} (ω_{j+1} - e^z ω_j)² = w_{j+1} ((ω_{j+1} - ω_j) - expm1(z) ω_j)²
            const double jump = (omega[i + 1] - omega[i]) - em1 * omega[i];
            if (jump != 0.0) {
                const double scaled = root_weight(i + 1) * jump;
                num -= d / dx * b_plus * scaled * scaled;
            }
        } else {
            num -= q * s * s;
        }
    }
    if (!(den > 0.0)) throw NumericalError("eigensolver", "zero weighted norm in Rayleigh quotient");
    return num / den;
}

double sigma1(double d, double q, const Profile& h, const Grid& grid, const EigenOptions& opts) {
    return principal_eigen(assemble(d, q, h, grid), opts).sigma1;
}

double sigma1(double d, double q, std::span<const double> h, const Grid& grid, const EigenOptions& opts) {
    return principal_eigen(assemble(d, q, h, grid), opts).sigma1;
}

// ---------------------------------------------------------------------------
// λ*

namespace {

/// Neumann stiffness K = -A(1,0,0) as tridiagonal bands.
struct Stiffness {
    std::vector<double> lower, diag, upper;
};

Stiffness neumann_stiffness(const Grid& grid) {
    const std::vector<double> zero(static_cast<std::size_t>(grid.size()), 0.0);
    const DiscreteOperator lap(1.0, 0.0, zero, grid);
    Stiffness k;
    for (std::size_t i = 0; i < zero.size(); ++i) {
        k.lower.push_back(-lap.lower()[i]);
        k.diag.push_back(-lap.diag()[i]);
        k.upper.push_back(-lap.upper()[i]);
    }
    return k;
}

double quad_form(const Stiffness& k, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double kx = k.diag[i] * x[i];
        if (i > 0) kx += k.lower[i] * x[i - 1];
        if (i + 1 < x.size()) kx += k.upper[i] * x[i + 1];
        s += x[i] * kx;
    }
    return s;
}

double weighted_norm2(std::span<const double> m, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += m[i] * x[i] * x[i];
    return s;
}

/// Rayleigh quotient iteration on the tridiagonal pencil (K, M).
void polish_pencil(const Stiffness& k, std::span<const double> m, double& lambda, std::vector<double>& psi) {
    const std::size_t n = psi.size();
    std::vector<double> di(n);
    std::vector<double> rhs(n);
    for (int it = 0; it < 4; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            di[i] = k.diag[i] - lambda * m[i];
            rhs[i] = m[i] * psi[i];
        }
        std::vector<double> next;
        try {
            next = solve_tridiagonal(k.lower, di, k.upper, rhs);
        } catch (const NumericalError&) {
            break;  // exact hit on the eigenvalue
        }
        const double scale = max_abs(next);
        if (!(scale > 0.0) || !std::isfinite(scale)) break;
        for (auto& x : next) x /= scale;
        const double mn = weighted_norm2(m, next);
        if (!(mn > 0.0)) break;
        psi = std::move(next);
        lambda = quad_form(k, psi) / mn;
    }
}

double lambda_residual(const Stiffness& k, std::span<const double> m, double lambda, std::span<const double> psi) {
    double r = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double kx = k.diag[i] * psi[i];
        if (i > 0) kx += k.lower[i] * psi[i - 1];
        if (i + 1 < psi.size()) kx += k.upper[i] * psi[i + 1];
        r = std::max(r, std::abs(-kx + lambda * m[i] * psi[i]));
    }
    return r;
}

void orient_and_normalize(std::vector<double>& psi) {
    const auto [mn, mx] = std::minmax_element(psi.begin(), psi.end());
    const double scale = std::abs(*mn) > std::abs(*mx) ? *mn : *mx;
    for (auto& x : psi) x /= scale;
}

/// Dense route returning (λ, ψ).
std::optional<std::pair<double, std::vector<double>>> generalized_solve(std::span<const double> weight,
                                                                        const Grid& grid) {
    const int n = grid.size();
    const Stiffness k = neumann_stiffness(grid);

    // Restrict to V = {ψ : Σ m_i ψ_i = 0}, where every eigenvector with λ ≠ 0
    // lives and K is positive definite. Orthonormal basis from a Householder
    // reflector mapping M·1 onto e₀.
    Eigen::VectorXd mvec(n);
    for (int i = 0; i < n; ++i) mvec(i) = weight[static_cast<std::size_t>(i)];
    const double norm = mvec.norm();
    if (norm == 0.0) return std::nullopt;
    Eigen::VectorXd u = mvec / norm;
    u(0) += u(0) >= 0 ? 1.0 : -1.0;
    u /= u.norm();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * u * u.transpose();
    const Eigen::MatrixXd basis = h.rightCols(n - 1);

    Eigen::MatrixXd kd = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        kd(i, i) = k.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            kd(i, i + 1) = k.upper[static_cast<std::size_t>(i)];
            kd(i + 1, i) = k.lower[static_cast<std::size_t>(i + 1)];
        }
    }
    const Eigen::MatrixXd kr = basis.transpose() * kd * basis;
    const Eigen::MatrixXd mr = basis.transpose() * mvec.asDiagonal() * basis;

    // M y = (1/λ) K y; the largest positive 1/λ gives the smallest positive λ.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(mr, kr);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver", "generalized eigensolve failed");
    Eigen::Index top = 0;
    const double inv_lambda = solver.eigenvalues().maxCoeff(&top);
    if (!(inv_lambda > 0.0)) return std::nullopt;

    const Eigen::VectorXd y = solver.eigenvectors().col(top);
    const Eigen::VectorXd full = basis * y;
    std::vector<double> psi(full.data(), full.data() + n);
    double lambda = 1.0 / inv_lambda;
    orient_and_normalize(psi);
    polish_pencil(k, weight, lambda, psi);
    if (!(weighted_norm2(weight, psi) > 0.0)) return std::nullopt;
    orient_and_normalize(psi);
    return std::make_pair(lambda, std::move(psi));
}

}  // namespace

std::optional<double> lambda_star_generalized(std::span<const double> weight, const Grid& grid) {
    auto res = generalized_solve(weight, grid);
    if (!res) return std::nullopt;
    return res->first;
}

double lambda_star_bisection(std::span<const double> weight, const Grid& grid, const LambdaStarOptions& opts) {
    EigenOptions eo;
    eo.dense_cross_check = false;
    auto sigma_at = [&](double nu) { return sigma1(nu, 0.0, weight, grid, eo); };

    double lo = opts.nu_low;
    double hi = opts.nu_high;
    // The weight being positive somewhere makes σ₁ > 0 for small ν; widen
    // the lower end when the positive set is tiny.
    while (sigma_at(lo) <= 0.0) {
        lo *= 0.1;
        if (lo < 1e-16) throw NumericalError("eigensolver", "cannot bracket sigma1(nu,0,m) = 0 from below");
    }
    while (sigma_at(hi) >= 0.0) {
        hi *= 10.0;
        if (hi > 1e16) throw NumericalError("eigensolver", "cannot bracket sigma1(nu,0,m) = 0 from above");
    }
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-14; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (sigma_at(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 2.0 / (lo + hi);
}

LambdaStar lambda_star_for_weight(std::span<const double> weight, const Grid& grid, const LambdaStarOptions& opts) {
    LambdaStar out;
    const auto n = static_cast<std::size_t>(grid.size());
    if (weight.size() != n) throw InputError("eigensolver", "weight size does not match grid");
    out.weight_integral = grid.integrate(weight);
    out.defined = *std::max_element(weight.begin(), weight.end()) > 0.0;
    if (!out.defined) return out;

    if (out.weight_integral >= -opts.integral_tolerance) {
        out.value = 0.0;
        out.psi.assign(n, 1.0);
        return out;
    }

    out.bisection_value = lambda_star_bisection(weight, grid, opts);
    const Stiffness k = neumann_stiffness(grid);

    if (opts.cross_check) {
        auto gen = generalized_solve(weight, grid);
        if (!gen) throw NumericalError("eigensolver", "generalized route found no positive eigenvalue");
        out.generalized_value = gen->first;
        const double rel = std::abs(out.generalized_value - out.bisection_value) /
                           std::max(out.generalized_value, out.bisection_value);
        if (rel > opts.agreement) {
            std::ostringstream os;
            os.precision(12);
            os << "lambda* routes disagree: generalized " << out.generalized_value << " vs bisection "
               << out.bisection_value << " (relative " << rel << ")";
            throw NumericalError("eigensolver", os.str());
        }
        out.value = out.generalized_value;
        out.psi = std::move(gen->second);
    } else {
        out.value = out.bisection_value;
        EigenOptions eo;
        eo.dense_cross_check = false;
        out.psi = principal_eigen(assemble(1.0 / out.value, 0.0, weight, grid), eo).phi1;
        polish_pencil(k, weight, out.value, out.psi);
        orient_and_normalize(out.psi);
    }
    out.residual = lambda_residual(k, weight, out.value, out.psi);
    return out;
}

}  // namespace advstab
