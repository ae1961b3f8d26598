#include <advstab/steady.hpp>

#include <advstab/eigensolver.hpp>
#include <advstab/error.hpp>
#include <advstab/operator.hpp>
#include <advstab/tridiagonal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace advstab {

Habitat::Habitat(Profile r_profile, Profile k_profile, const Grid& g)
    : grid(g), r(std::move(r_profile)), K(std::move(k_profile)), r_nodes(evaluate(r, g)), k_nodes(evaluate(K, g)) {
    for (std::size_t i = 0; i < r_nodes.size(); ++i) {
        if (!(r_nodes[i] > 0.0)) throw InputError("steady", "growth rate r must be positive on the grid");
        if (!(k_nodes[i] > 0.0)) throw InputError("steady", "carrying capacity K must be positive on the grid");
    }
}

double SteadyState::max() const { return *std::max_element(field.begin(), field.end()); }
double sup_norm(const std::vector<double>& f) {
    if (f.empty()) return 0.0;
    const auto it = std::max_element(f.begin(), f.end());
    const auto i = static_cast<std::size_t>(it - f.begin());
    const double top = *it;
    const std::size_t n = f.size();
    if (n < 3) return top;
    if (i == n - 1) return std::max(top, top + (top - f[n - 2]) / 8.0);
    if (i == 0) return top;
    const double a = 0.5 * (f[i + 1] - 2.0 * top + f[i - 1]);
    const double b = 0.5 * (f[i + 1] - f[i - 1]);
    if (!(a < 0.0)) return top;
    const double t = -b / (2.0 * a);
    if (std::abs(t) > 1.0) return top;
    return top - b * b / (4.0 * a);
}

double SteadyState::min() const { return *std::min_element(field.begin(), field.end()); }

namespace {

struct Residual {
    std::vector<double> F;
    double scaled = 0.0;
    double raw = 0.0;
};

Residual residual_of(const DiscreteOperator& a, const Habitat& hab, std::span<const double> u) {
    Residual res;
    res.F = a.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = hab.r_nodes[i];
        res.F[i] += r * u[i] * (1.0 - u[i] / hab.k_nodes[i]);
        const double f = std::abs(res.F[i]);
        res.raw = std::max(res.raw, f);
        res.scaled = std::max(res.scaled, f / (std::abs(a.diag()[i]) + r));
    }
    return res;
}

double max_of(std::span<const double> u) { return *std::max_element(u.begin(), u.end()); }

bool all_positive(std::span<const double> u) {
    return std::all_of(u.begin(), u.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

/// Semi-implicit relaxation: diffusion-advection implicit, logistic term
/// explicit.
void relax(const DiscreteOperator& a, const Habitat& hab, std::vector<double>& u, int steps) {
    const double rmax = max_of(hab.r_nodes);
    const double dt = 0.5 / rmax;
    const auto n = u.size();
    std::vector<double> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -dt * a.lower()[i];
        di[i] = 1.0 - dt * a.diag()[i];
        up[i] = -dt * a.upper()[i];
    }
    const TridiagonalLU lu(lo, di, up);
    std::vector<double> rhs(n);
    for (int s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const double grow = 1.0 + dt * hab.r_nodes[i] * (1.0 - u[i] / hab.k_nodes[i]);
            rhs[i] = u[i] * std::max(grow, 1e-3);
        }
        lu.solve(rhs, u);
    }
}

}  // namespace

SteadyState newton_steady(double mu, double q, const Habitat& hab, std::vector<double> start,
                          const SteadyOptions& opts) {
    if (!(mu > 0.0)) throw InputError("steady", "diffusion rate must be positive");
    if (start.size() != static_cast<std::size_t>(hab.grid.size())) {
        throw InputError("steady", "starting field does not match the grid");
    }
    if (!all_positive(start)) throw InputError("steady", "starting field must be positive");

    const std::vector<double> zero(start.size(), 0.0);
    const DiscreteOperator a(mu, q, zero, hab.grid);
    const auto n = start.size();

    SteadyState out;
    out.mu = mu;
    out.q = q;
    std::vector<double> u = std::move(start);
    Residual res = residual_of(a, hab, u);
    std::vector<double> history{res.scaled};
    std::vector<double> jd(n), rhs(n), trial(n);
    int relax_rounds = 0;
    bool converged = false;
    // Converged once a full Newton step is below step_tolerance relative to
    // max u and the residual meets the tolerance.
    constexpr double step_tolerance = 1e-12;

    int it = 0;
    while (!converged && it < opts.max_newton) {
        ++it;
        for (std::size_t i = 0; i < n; ++i) {
            jd[i] = a.diag()[i] + hab.r_nodes[i] * (1.0 - 2.0 * u[i] / hab.k_nodes[i]);
            rhs[i] = -res.F[i];
        }
        std::vector<double> delta;
        try {
            delta = solve_tridiagonal(a.lower(), jd, a.upper(), rhs);
        } catch (const NumericalError&) {
            delta.clear();
        }

        bool accepted = false;
        bool small_step = false;
        if (!delta.empty()) {
            double step_norm = 0.0;
            for (double d : delta) step_norm = std::max(step_norm, std::abs(d));
            small_step = step_norm <= step_tolerance * max_of(u);
            double lambda = 1.0;
            for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * delta[i];
                if (!all_positive(trial)) continue;
                Residual tr = residual_of(a, hab, trial);
                if (small_step || tr.scaled < (1.0 - 1e-4 * lambda) * res.scaled) {
                    u = trial;
                    res = std::move(tr);
                    accepted = true;
                    break;
                }
            }
        }
        history.push_back(res.scaled);
        converged = accepted && small_step && res.scaled <= opts.tolerance * max_of(u);
        if (converged) break;

        const bool stalled = history.size() > 5 && res.scaled > 0.5 * history[history.size() - 6] &&
                             res.scaled > opts.tolerance * max_of(u);
        if (!accepted || stalled) {
            if (relax_rounds >= 3) break;
            ++relax_rounds;
            out.smoothed = true;
            relax(a, hab, u, 20);
            res = residual_of(a, hab, u);
            history.assign(1, res.scaled);
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Newton did not converge (mu=" << mu << ", q=" << q << ", residual " << res.scaled << " after " << it
           << " iterations)";
        throw NumericalError("steady", os.str());
    }
    out.field = std::move(u);
    out.residual = res.scaled;
    out.raw_residual = res.raw;
    out.newton_iters = it;
    return out;
}

SteadyState solve_eta(double mu, const Habitat& hab, const SteadyOptions& opts) {
    auto eta = newton_steady(mu, 0.0, hab, hab.k_nodes, opts);
    if (opts.uniqueness_check) {
        const double kmin = *std::min_element(hab.k_nodes.begin(), hab.k_nodes.end());
        const auto other = newton_steady(mu, 0.0, hab, std::vector<double>(hab.k_nodes.size(), kmin), opts);
        double diff = 0.0;
        for (std::size_t i = 0; i < other.field.size(); ++i) diff = std::max(diff, std::abs(other.field[i] - eta.field[i]));
        if (diff > 1e-7 * eta.max()) {
            std::ostringstream os;
            os << "two Newton starts reached different states at mu=" << mu << " (difference " << diff << ")";
            throw NumericalError("steady", os.str());
        }
    }
    return eta;
}

SteadyState solve_eta(double mu, const Profile& r, const Profile& K, const Grid& grid, const SteadyOptions& opts) {
    return solve_eta(mu, Habitat(r, K, grid), opts);
}

SteadyState continue_in_q(const Habitat& hab, const SteadyState& from, double q_target, double max_step,
                          const SteadyOptions& opts) {
    if (!(max_step > 0.0)) throw InputError("steady", "continuation step must be positive");
    SteadyState current = from;
    int total_iters = from.newton_iters;
    int steps = 0;
    double step = max_step;
    const double min_step = 1e-12 * std::max(1.0, q_target);
    const double direction = q_target >= from.q ? 1.0 : -1.0;
    while (direction * (q_target - current.q) > 0.0) {
        const double next = direction > 0 ? std::min(q_target, current.q + step) : std::max(q_target, current.q - step);
        try {
            SteadyState s = newton_steady(current.mu, next, hab, current.field, opts);
            total_iters += s.newton_iters;
            current = std::move(s);
            ++steps;
            step = std::min(max_step, 2.0 * step);
        } catch (const NumericalError&) {
            step *= 0.5;
            if (step < min_step) throw;
        }
    }
    current.newton_iters = total_iters;
    current.continuation_steps = from.continuation_steps + steps;
    return current;
}

SteadyState solve_theta(double mu, double q, const Habitat& hab, std::optional<double> qstar,
                        const SteadyOptions& opts) {
    if (!(q >= 0.0)) throw InputError("steady", "advection rate must be non-negative");
    auto eta = solve_eta(mu, hab, opts);
    if (q == 0.0) return eta;
    const double qs = qstar ? *qstar : find_qstar(mu, hab.r_nodes, hab.grid).qstar;
    if (q >= qs) {
        std::ostringstream os;
        os.precision(10);
        os << "q = " << q << ", q* = " << qs;
        throw NoSteadyStateError(os.str());
    }
    return continue_in_q(hab, eta, q, qs * opts.step_fraction, opts);
}

SteadyState solve_theta(double mu, double q, const Profile& r, const Profile& K, const Grid& grid,
                        const SteadyOptions& opts) {
    return solve_theta(mu, q, Habitat(r, K, grid), std::nullopt, opts);
}

WashoutThreshold find_qstar(double mu, std::span<const double> r_nodes, const Grid& grid, double width) {
    if (!(mu > 0.0)) throw InputError("steady", "diffusion rate must be positive");
    EigenOptions fast;
    fast.dense_cross_check = false;
    auto sigma = [&](double q) { return sigma1(mu, q, r_nodes, grid, fast); };
    if (!(sigma(0.0) > 0.0)) throw InputError("steady", "sigma1(mu,0,r) <= 0: no washout threshold");

    double lo = 0.0;
    double hi = 1.0;
    while (sigma(hi) >= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("steady", "washout threshold bracket exploded");
    }
    // Keep going past the width target until σ₁ at the midpoint is tiny.
    double mid = 0.5 * (lo + hi);
    double s_mid = sigma(mid);
    while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi &&
           (hi - lo > width || std::abs(s_mid) > 1e-9)) {
        if (s_mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        s_mid = sigma(mid);
    }
    WashoutThreshold out;
    out.mu = mu;
    out.qstar = mid;
    out.bracket_width = hi - lo;
    EigenOptions checked;
    out.sigma_at_qstar = sigma1(mu, mid, r_nodes, grid, checked);
    return out;
}

WashoutThreshold find_qstar(double mu, const Profile& r, const Grid& grid, double width) {
    const auto nodes = evaluate(r, grid);
    return find_qstar(mu, nodes, grid, width);
}

double flux_identity_residual(const SteadyState& s, const Habitat& hab) {
    double source = 0.0;
    for (std::size_t i = 0; i < s.field.size(); ++i) {
        source += hab.r_nodes[i] * s.field[i] * (1.0 - s.field[i] / hab.k_nodes[i]);
    }
    source *= hab.grid.dx();
    return std::abs(s.q * s.field.back() - source);
}

void write_field_csv(std::ostream& os, const Grid& grid, const std::vector<double>& field) {
    os << "x,value\n";
    const auto old = os.precision(17);
    for (int i = 0; i < grid.size(); ++i) os << grid.node(i) << ',' << field[static_cast<std::size_t>(i)] << '\n';
    os.precision(old);
}

}  // namespace advstab
