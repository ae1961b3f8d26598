#include <advstab/dynamics.hpp>
#include <advstab/error.hpp>
#include <advstab/operator.hpp>
#include <advstab/tridiagonal.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

namespace advstab {

namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

/// I - dt·A for the transport part of one species.
TridiagonalLU implicit_factor(double d, double q, double dt, const Grid& grid) {
    const std::vector<double> zero(static_cast<std::size_t>(grid.size()), 0.0);
    const auto a = assemble(d, q, zero, grid);
    const auto n = zero.size();
    std::vector<double> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -dt * a.lower()[i];
        di[i] = 1.0 - dt * a.diag()[i];
        up[i] = -dt * a.upper()[i];
    }
    return TridiagonalLU(lo, di, up);
}

void check_field(const std::vector<double>& f, double cap, const char* name) {
    for (double x : f) {
        if (!std::isfinite(x)) throw NumericalError("dynamics", std::string(name) + " is not finite");
        if (x < -1e-12) throw NumericalError("dynamics", std::string(name) + " lost positivity");
        if (x > cap) throw NumericalError("dynamics", std::string(name) + " blew up");
    }
}

void check_initial(const std::vector<double>& f, int n, const char* name) {
    if (static_cast<int>(f.size()) != n) throw InputError("dynamics", std::string(name) + " has the wrong size");
    bool nonzero = false;
    for (double x : f) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("dynamics", std::string(name) + " must be nonnegative");
        nonzero = nonzero || x > 0.0;
    }
    if (!nonzero) throw InputError("dynamics", std::string(name) + " is identically zero");
}

/// One or two species advanced by the same IMEX splitting.
class Stepper {
public:
    Stepper(double mu, double q, const Habitat& hab, const Predator* p, double dt)
        : hab_(hab), p_(p), dt_(dt), lu_u_(implicit_factor(mu, q, dt, hab.grid)) {
        if (p_) lu_v_ = implicit_factor(p_->nu, q, dt, hab.grid);
        rhs_.resize(static_cast<std::size_t>(hab.grid.size()));
    }

    void step(std::vector<double>& u, std::vector<double>* v) {
        const auto n = u.size();
        for (std::size_t i = 0; i < n; ++i) {
            double g = hab_.r_nodes[i] * (1.0 - u[i] / hab_.k_nodes[i]);
            if (v) g -= (*v)[i];
            rhs_[i] = u[i] * (1.0 + dt_ * g);
        }
        if (v) {
            std::vector<double>& vv = *v;
            for (std::size_t i = 0; i < n; ++i) vv[i] *= 1.0 + dt_ * (p_->b * u[i] - p_->gamma);
            lu_v_->solve(vv, vv);
        }
        lu_u_.solve(rhs_, u);
    }

private:
    const Habitat& hab_;
    const Predator* p_;
    double dt_;
    TridiagonalLU lu_u_;
    std::optional<TridiagonalLU> lu_v_;
    std::vector<double> rhs_;
};

Trajectory integrate(double mu, double q, const Predator* p, const Habitat& hab, std::vector<double> u,
                     std::optional<std::vector<double>> v, const TimeOptions& opts) {
    if (!(mu > 0.0) || !(q >= 0.0)) throw InputError("dynamics", "mu must be positive and q nonnegative");
    if (!(opts.T > 0.0)) throw InputError("dynamics", "final time must be positive");
    if (opts.max_samples < 3) throw InputError("dynamics", "at least 3 samples are required");
    const int n = hab.grid.size();
    check_initial(u, n, "u0");
    if (v) check_initial(*v, n, "v0");

    double dt = opts.dt > 0.0 ? opts.dt : default_time_step(hab, u, v ? &*v : nullptr, p);
    const long steps = static_cast<long>(std::ceil(opts.T / dt - 1e-9));
    dt = opts.T / static_cast<double>(steps);
    const long stride = (steps + opts.max_samples - 3) / (opts.max_samples - 2);
    const double cap = 10.0 * max_of(hab.k_nodes);

    Trajectory tr;
    tr.dt_used = dt;
    tr.steps = static_cast<int>(steps);
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.u_fields.push_back(u);
        tr.u_mass.push_back(hab.grid.integrate(u));
        if (v) {
            tr.v_fields.push_back(*v);
            tr.v_mass.push_back(hab.grid.integrate(*v));
        }
    };
    record(0.0);
    Stepper stepper(mu, q, hab, p, dt);
    std::vector<double> previous;
    for (long s = 1; s <= steps; ++s) {
        if (s == steps) previous = u;
        stepper.step(u, v ? &*v : nullptr);
        check_field(u, cap, "u");
        if (v) check_field(*v, 1e300, "v");
        if (s % stride == 0 || s == steps) record(static_cast<double>(s) * dt);
    }
    double rate = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) rate = std::max(rate, std::abs(u[i] - previous[i]) / dt);
    tr.final_rate = rate;
    return tr;
}

struct Fit {
    double rate = 0.0;
    double start = 0.0;
    double end = 0.0;
    int points = 0;
};

/// Least-squares slope of log ∫v over the later half of the in-window time.
Fit fit_invasion(double mu, double q, const Predator& p, const Habitat& hab, const SteadyState& theta, double eps,
                 double dt, const InvasionOptions& opts) {
    std::vector<double> u = theta.field;
    std::vector<double> v(u.size(), eps);
    Stepper stepper(mu, q, hab, &p, dt);
    const long steps = static_cast<long>(std::ceil(opts.T / dt - 1e-9));
    const double lo = eps / opts.window;
    const double hi = eps * opts.window;
    std::vector<double> ts{0.0};
    std::vector<double> ls{std::log(hab.grid.integrate(v))};
    const double cap = 10.0 * max_of(hab.k_nodes);
    for (long s = 1; s <= steps; ++s) {
        stepper.step(u, &v);
        check_field(u, cap, "u");
        check_field(v, 1e300, "v");
        const double m = hab.grid.integrate(v);
        if (!(m >= lo && m <= hi)) break;
        ts.push_back(static_cast<double>(s) * dt);
        ls.push_back(std::log(m));
    }
    const double t_half = 0.5 * ts.back();
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    int k = 0;
    Fit f;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_half) continue;
        if (k == 0) f.start = ts[i];
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
        ++k;
    }
    f.end = ts.back();
    f.points = k;
    if (k >= 2) {
        const double denom = k * stt - st * st;
        f.rate = (k * stl - st * sl) / denom;
    }
    return f;
}

}  // namespace

double default_time_step(const Habitat& hab, const std::vector<double>& u, const std::vector<double>* v,
                         const Predator* p) {
    // Bound on |∂(reaction)/∂(state)| over the current state.
    double slope = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double s = hab.r_nodes[i] * std::max(1.0, std::abs(1.0 - 2.0 * u[i] / hab.k_nodes[i]));
        if (v) s += (*v)[i] + u[i];
        slope = std::max(slope, s);
        if (p) slope = std::max(slope, std::abs(p->b * u[i] - p->gamma) + p->b * (v ? (*v)[i] : 0.0));
    }
    return std::min(0.1, 0.5 / slope);
}

Trajectory integrate_single(double mu, double q, const Habitat& hab, std::vector<double> u0,
                            const TimeOptions& opts) {
    return integrate(mu, q, nullptr, hab, std::move(u0), std::nullopt, opts);
}

Trajectory integrate_system(double mu, double q, const Predator& p, const Habitat& hab, std::vector<double> u0,
                            std::vector<double> v0, const TimeOptions& opts) {
    if (!(p.nu > 0.0) || !(p.b > 0.0) || !(p.gamma > 0.0)) {
        throw InputError("dynamics", "nu, b and gamma must be positive");
    }
    return integrate(mu, q, &p, hab, std::move(u0), std::move(v0), opts);
}

InvasionResult invasion_test(double mu, double q, const Predator& p, const Habitat& hab,
                             const InvasionOptions& opts) {
    if (!(p.nu > 0.0) || !(p.b > 0.0) || !(p.gamma > 0.0)) {
        throw InputError("dynamics", "nu, b and gamma must be positive");
    }
    if (!(opts.eps > 0.0) || opts.eps > 1e-4) throw InputError("dynamics", "eps must be in (0, 1e-4]");
    if (!(q > 0.0)) throw InputError("dynamics", "q must be positive");
    const auto theta = solve_theta(mu, q, hab);

    InvasionResult out;
    out.eps = opts.eps;
    out.dt = opts.dt;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const Fit coarse = fit_invasion(mu, q, p, hab, theta, out.eps, out.dt, opts);
        const Fit fine = fit_invasion(mu, q, p, hab, theta, out.eps, 0.5 * out.dt, opts);
        if (coarse.points >= opts.min_points && fine.points >= opts.min_points) {
            out.rate_dt = coarse.rate;
            out.rate_half_dt = fine.rate;
            out.rate = 2.0 * fine.rate - coarse.rate;
            out.fit_start = fine.start;
            out.fit_end = fine.end;
            out.fit_points = fine.points;
            return out;
        }
        if (attempt == 0) {
            out.eps *= 0.1;
            out.dt *= 0.25;
            out.retried = true;
        }
    }
    throw NumericalError("dynamics", "predator left the linear window too fast to fit a rate");
}

void write_trajectory_csv(std::ostream& os, const Grid& grid, const Trajectory& tr) {
    const auto old = os.precision(17);
    os << "t,x,u,v\n";
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        for (int i = 0; i < grid.size(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            os << tr.times[s] << ',' << grid.node(i) << ',' << tr.u_fields[s][k] << ',';
            if (tr.has_predator()) os << tr.v_fields[s][k];
            os << '\n';
        }
    }
    os.precision(old);
}

}  // namespace advstab
