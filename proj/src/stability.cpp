#include <advstab/error.hpp>
#include <advstab/parallel.hpp>
#include <advstab/stability.hpp>

#include <cmath>
#include <ostream>

namespace advstab {

namespace {

SteadyOptions quick_steady() {
    SteadyOptions o;
    o.uniqueness_check = false;
    return o;
}

EigenOptions quick_eigen() {
    EigenOptions o;
    o.dense_cross_check = false;
    return o;
}

void check_predator(const Predator& p) {
    if (!(p.nu > 0.0) || !(p.b > 0.0) || !(p.gamma > 0.0)) {
        throw InputError("stability", "nu, b and gamma must be positive");
    }
}

double sigma_of(const SteadyState& s, const Predator& p, const Grid& grid, const EigenOptions& eig) {
    const auto h = predator_potential(p, s.field);
    return sigma1(p.nu, s.q, h, grid, eig);
}

/// Bisection on (lo, hi) where σ > 0 at lo (state given) and σ <= 0 at hi.
void bisect_threshold(CriticalQ& out, const Predator& p, const Habitat& hab, SteadyState lo_state, double width) {
    const double max_step = out.qstar / 40.0;
    const auto steady = quick_steady();
    const auto eig = quick_eigen();
    while (out.hi - out.lo > width) {
        const double mid = 0.5 * (out.lo + out.hi);
        if (mid <= out.lo || mid >= out.hi) break;
        auto state = continue_in_q(hab, lo_state, mid, max_step, steady);
        const double s = sigma_of(state, p, hab.grid, eig);
        if (s > 0.0) {
            out.lo = mid;
            out.sigma_lo = s;
            lo_state = std::move(state);
        } else {
            out.hi = mid;
            out.sigma_hi = s;
        }
    }
    out.value = 0.5 * (out.lo + out.hi);
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::Unstable: return "Unstable";
        case Verdict::Marginal: return "Marginal";
    }
    return "?";
}

Verdict verdict_of(double sigma) {
    if (sigma > marginal_tolerance) return Verdict::Unstable;
    if (sigma < -marginal_tolerance) return Verdict::Stable;
    return Verdict::Marginal;
}

std::vector<double> predator_potential(const Predator& p, const std::vector<double>& theta) {
    std::vector<double> h(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) h[i] = p.b * theta[i] - p.gamma;
    return h;
}

StabilityVerdict classify_state(const SteadyState& theta, const Predator& p, const Grid& grid,
                                const EigenOptions& eig) {
    check_predator(p);
    StabilityVerdict v;
    v.mu = theta.mu;
    v.nu = p.nu;
    v.q = theta.q;
    v.sigma = sigma_of(theta, p, grid, eig);
    v.verdict = verdict_of(v.sigma);
    v.margin = std::abs(v.sigma) / marginal_tolerance;
    return v;
}

StabilityVerdict classify(double mu, double q, const Predator& p, const Habitat& hab, std::optional<double> qstar) {
    check_predator(p);
    if (!(mu > 0.0)) throw InputError("stability", "mu must be positive");
    const double qs = qstar ? *qstar : find_qstar(mu, hab.r_nodes, hab.grid).qstar;
    const auto theta = solve_theta(mu, q, hab, qs);
    auto v = classify_state(theta, p, hab.grid);
    v.qstar = qs;
    return v;
}

CriticalQ critical_q(double mu, const Predator& p, const Habitat& hab, double width, std::optional<double> qstar) {
    check_predator(p);
    if (!(mu > 0.0)) throw InputError("stability", "mu must be positive");
    if (!(width > 0.0)) throw InputError("stability", "bisection width must be positive");
    CriticalQ out;
    out.mu = mu;
    out.qstar = qstar ? *qstar : find_qstar(mu, hab.r_nodes, hab.grid).qstar;
    const auto eta = solve_eta(mu, hab);
    out.sigma_at_zero = sigma_of(eta, p, hab.grid, EigenOptions{});
    if (!(out.sigma_at_zero > 0.0)) return out;
    out.exists = true;
    out.lo = 0.0;
    out.sigma_lo = out.sigma_at_zero;
    out.hi = out.qstar;
    // Limit value as θ → 0 at q*.
    out.sigma_hi = -p.gamma;
    bisect_threshold(out, p, hab, eta, width);
    return out;
}

int RegionMap::transitions(std::size_t column) const {
    int count = 0;
    int last = 0;
    for (const auto& c : cells[column]) {
        if (c.failed || c.verdict == Verdict::Marginal) continue;
        const int s = c.verdict == Verdict::Unstable ? 1 : -1;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

bool RegionMap::columns_monotone() const {
    for (const auto& col : cells) {
        bool seen_stable = false;
        for (const auto& c : col) {
            if (c.failed) continue;
            if (c.verdict == Verdict::Stable) seen_stable = true;
            if (c.verdict == Verdict::Unstable && seen_stable) return false;
        }
    }
    return true;
}

bool RegionMap::all(Verdict v) const {
    for (const auto& col : cells) {
        for (const auto& c : col) {
            if (c.failed || c.verdict != v) return false;
        }
    }
    return true;
}

RegionMap sweep_region(const std::vector<double>& mu_samples, const Predator& p, const Habitat& hab,
                       const SweepOptions& opts) {
    check_predator(p);
    if (opts.q_resolution < 2) throw InputError("stability", "q resolution must be at least 2");
    if (!(opts.q_low_fraction > 0.0) || !(opts.q_high_fraction < 1.0) || !(opts.q_low_fraction < opts.q_high_fraction)) {
        throw InputError("stability", "q fractions must satisfy 0 < low < high < 1");
    }
    for (double mu : mu_samples) {
        if (!(mu > 0.0)) throw InputError("stability", "mu samples must be positive");
    }

    RegionMap map;
    map.predator = p;
    map.mu_samples = mu_samples;
    const std::size_t nq = static_cast<std::size_t>(opts.q_resolution);
    for (std::size_t j = 0; j < nq; ++j) {
        map.q_fractions.push_back(opts.q_low_fraction +
                                  (opts.q_high_fraction - opts.q_low_fraction) * static_cast<double>(j) /
                                      static_cast<double>(nq - 1));
    }
    const std::size_t nmu = mu_samples.size();
    map.qstar_curve.assign(nmu, 0.0);
    map.cells.assign(nmu, std::vector<RegionCell>(nq));
    map.boundary.assign(nmu, std::nullopt);
    std::vector<std::vector<RegionFailure>> failures(nmu);

    const auto steady = quick_steady();
    parallel_for(nmu, opts.jobs, [&](std::size_t i) {
        const double mu = mu_samples[i];
        auto& column = map.cells[i];
        double qs = 0.0;
        std::optional<SteadyState> eta;
        try {
            qs = find_qstar(mu, hab.r_nodes, hab.grid).qstar;
            eta = solve_eta(mu, hab, steady);
        } catch (const Error& e) {
            for (std::size_t j = 0; j < nq; ++j) column[j].failed = true;
            failures[i].push_back({i, 0, e.what()});
            return;
        }
        map.qstar_curve[i] = qs;
        std::vector<std::optional<SteadyState>> states(nq);
        SteadyState state = *eta;
        for (std::size_t j = 0; j < nq; ++j) {
            auto& cell = column[j];
            cell.q = map.q_fractions[j] * qs;
            EigenOptions eig = quick_eigen();
            const std::size_t index = i * nq + j;
            if (opts.dense_check_every > 0 && index % static_cast<std::size_t>(opts.dense_check_every) == 0) {
                eig.dense_cross_check = true;
            }
            try {
                state = continue_in_q(hab, state, cell.q, qs / 40.0, steady);
                cell.sigma = sigma_of(state, p, hab.grid, eig);
                cell.verdict = verdict_of(cell.sigma);
                states[j] = state;
            } catch (const Error& e) {
                cell.failed = true;
                failures[i].push_back({i, j, e.what()});
                state = *eta;
            }
        }
        if (!opts.refine_boundary) return;
        // First Unstable → Stable step, Marginal cells skipped.
        std::optional<std::size_t> last_unstable;
        for (std::size_t j = 0; j < nq; ++j) {
            const auto& c = column[j];
            if (c.failed || c.verdict == Verdict::Marginal) continue;
            if (c.verdict == Verdict::Unstable) {
                last_unstable = j;
            } else if (last_unstable) {
                CriticalQ cq;
                cq.mu = mu;
                cq.qstar = qs;
                cq.exists = true;
                cq.lo = column[*last_unstable].q;
                cq.sigma_lo = column[*last_unstable].sigma;
                cq.hi = c.q;
                cq.sigma_hi = c.sigma;
                try {
                    bisect_threshold(cq, p, hab, *states[*last_unstable], opts.boundary_width);
                    map.boundary[i] = cq.value;
                } catch (const Error& e) {
                    failures[i].push_back({i, j, e.what()});
                }
                break;
            }
        }
    });
    for (auto& f : failures) {
        for (auto& x : f) map.failures.push_back(std::move(x));
    }
    return map;
}

void write_region_csv(std::ostream& os, const RegionMap& map) {
    const auto old = os.precision(17);
    os << "mu,q,sigma,verdict\n";
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
        for (const auto& c : map.cells[i]) {
            os << map.mu_samples[i] << ',' << c.q << ',';
            if (c.failed) {
                os << "nan,Failed\n";
            } else {
                os << c.sigma << ',' << verdict_name(c.verdict) << '\n';
            }
        }
    }
    os.precision(old);
}

SignChanges sign_changes_in_mu(const Predator& p, const Habitat& hab, const std::vector<double>& mu_range, int jobs,
                               double width) {
    check_predator(p);
    const auto steady = quick_steady();
    const auto eig = quick_eigen();
    auto f = [&](double mu) {
        const auto eta = solve_eta(mu, hab, steady);
        return sigma_of(eta, p, hab.grid, eig);
    };
    SignChanges out;
    out.mu = mu_range;
    out.sigma.assign(mu_range.size(), 0.0);
    parallel_for(mu_range.size(), jobs, [&](std::size_t i) { out.sigma[i] = f(mu_range[i]); });
    std::vector<std::size_t> changes;
    for (std::size_t i = 0; i + 1 < mu_range.size(); ++i) {
        if (sign_of(out.sigma[i]) * sign_of(out.sigma[i + 1]) < 0) changes.push_back(i);
    }
    out.locations.resize(changes.size());
    parallel_for(changes.size(), jobs, [&](std::size_t k) {
        const std::size_t i = changes[k];
        out.locations[k] = bisect_log(f, mu_range[i], mu_range[i + 1], out.sigma[i], out.sigma[i + 1], width);
    });
    return out;
}

}  // namespace advstab
