#include <advstab/thresholds.hpp>

#include <advstab/error.hpp>
#include <advstab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace advstab {

std::vector<double> log_range(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InputError("thresholds", "invalid logarithmic range");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_mu_range() { return log_range(1e-3, 1e4, 41); }

namespace {

SteadyOptions scan_options() {
    SteadyOptions o;
    o.uniqueness_check = false;
    return o;
}

EtaSample sample_eta(const Habitat& hab, double mu) {
    const auto eta = solve_eta(mu, hab, scan_options());
    return {mu, hab.grid.integrate(eta.field), eta.max()};
}

/// Golden-section search for a maximum of f on [lo, hi] in log μ.
template <typename F>
std::pair<double, double> golden_max_log(F&& f, double lo, double hi, double log_tol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo);
    double b = std::log(hi);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(std::exp(c));
    double fd = f(std::exp(d));
    while (b - a > log_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(std::exp(d));
        }
    }
    return fc >= fd ? std::pair{std::exp(c), fc} : std::pair{std::exp(d), fd};
}

std::vector<double> weight_of(double b, double gamma, std::span<const double> eta) {
    std::vector<double> m(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) m[i] = b * eta[i] - gamma;
    return m;
}

}  // namespace

std::vector<EtaSample> scan_eta(const Habitat& hab, const std::vector<double>& mus, int jobs) {
    std::vector<EtaSample> out(mus.size());
    parallel_for(mus.size(), jobs, [&](std::size_t i) { out[i] = sample_eta(hab, mus[i]); });
    return out;
}

GammaThresholds gamma_thresholds(double b, const Habitat& hab, const std::vector<double>& mu_range, int jobs) {
    if (!(b > 0.0)) throw InputError("thresholds", "conversion rate b must be positive");
    if (mu_range.size() < 2) throw InputError("thresholds", "mu range needs at least two samples");
    GammaThresholds t;
    t.b = b;
    const double int_r = integrate(hab.r);
    const Profile& r = hab.r;
    const Profile& k = hab.K;
    const auto ratio = Profile::sampled(
        [] {
            std::vector<double> xs(4097);
            for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / 4096.0;
            return xs;
        }(),
        [&] {
            std::vector<double> v(4097);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double x = static_cast<double>(i) / 4096.0;
                v[i] = r(x) / k(x);
            }
            return v;
        }());
    // Simpson on the same 4096 intervals as the tabulated ratio is exact on its vertices.
    t.gamma1 = b * integrate(k);
    t.gamma2 = b * int_r / integrate(ratio);
    t.gamma4 = b * max_value(k);

    t.mu_grid_used = scan_eta(hab, mu_range, jobs);
    const auto& s = t.mu_grid_used;
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].integral > s[best].integral) best = i;
    }
    t.gamma3_low_end = b * s.front().integral;
    t.gamma3_high_end = b * s.back().integral;
    t.gamma3_mu = s[best].mu;
    t.gamma3_scan = b * s[best].integral;
    if (best > 0 && best + 1 < s.size()) {
        auto f = [&](double mu) { return sample_eta(hab, mu).integral; };
        const auto [mu, val] = golden_max_log(f, s[best - 1].mu, s[best + 1].mu, 1e-5);
        if (b * val > t.gamma3_scan) {
            t.gamma3_scan = b * val;
            t.gamma3_mu = mu;
        }
    }
    t.gamma3 = std::max({t.gamma3_scan, t.gamma1, t.gamma2});
    t.gamma3_from_limit = t.gamma3 > t.gamma3_scan;
    return t;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::I: return "I";
        case Regime::II: return "II";
        case Regime::III: return "III";
        case Regime::IV: return "IV";
        case Regime::V: return "V";
        case Regime::Boundary: return "BOUNDARY";
    }
    return "?";
}

Regime gamma_regime(double gamma, const GammaThresholds& t) {
    if (gamma <= t.gamma1 + regime_tolerance) return Regime::I;
    if (gamma >= t.gamma4 - regime_tolerance) return Regime::V;
    if (std::abs(gamma - t.gamma2) <= regime_tolerance || std::abs(gamma - t.gamma3) <= regime_tolerance) {
        return Regime::Boundary;
    }
    if (gamma < t.gamma2) return Regime::II;
    if (gamma < t.gamma3) return Regime::III;
    return Regime::IV;
}

LambdaStar lambda_star(double mu, double b, double gamma, const SteadyState& eta, const Grid& grid,
                       const LambdaStarOptions& opts) {
    if (!(b > 0.0) || !(gamma > 0.0)) throw InputError("eigensolver", "b and gamma must be positive");
    const auto m = weight_of(b, gamma, eta.field);
    auto out = lambda_star_for_weight(m, grid, opts);
    out.mu = mu;
    return out;
}

LambdaStar lambda_star(double mu, double b, double gamma, const Habitat& hab, const LambdaStarOptions& opts) {
    return lambda_star(mu, b, gamma, solve_eta(mu, hab, scan_options()), hab.grid, opts);
}

StructuralRoots structural_roots(double b, double gamma, const Habitat& hab, const std::vector<double>& mu_range,
                                 const RootOptions& opts) {
    if (!(b > 0.0) || !(gamma > 0.0)) throw InputError("thresholds", "b and gamma must be positive");
    StructuralRoots out;
    out.eta_table = scan_eta(hab, mu_range, opts.jobs);
    const auto& s = out.eta_table;

    auto f_int = [&](double mu) { return b * sample_eta(hab, mu).integral - gamma; };
    auto f_max = [&](double mu) { return b * sample_eta(hab, mu).maximum - gamma; };

    std::vector<std::size_t> int_changes;
    std::vector<std::size_t> max_changes;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double a0 = b * s[i].integral - gamma;
        const double a1 = b * s[i + 1].integral - gamma;
        if (sign_of(a0) * sign_of(a1) < 0) int_changes.push_back(i);
        const double m0 = b * s[i].maximum - gamma;
        const double m1 = b * s[i + 1].maximum - gamma;
        if (sign_of(m0) * sign_of(m1) < 0) max_changes.push_back(i);
    }
    out.integral_sign_changes = static_cast<int>(int_changes.size());
    out.maximum_sign_changes = static_cast<int>(max_changes.size());

    auto refine = [&](auto& f, const std::vector<EtaSample>& tab, std::size_t i, bool use_integral) {
        const double v0 = b * (use_integral ? tab[i].integral : tab[i].maximum) - gamma;
        const double v1 = b * (use_integral ? tab[i + 1].integral : tab[i + 1].maximum) - gamma;
        return bisect_log(f, tab[i].mu, tab[i + 1].mu, v0, v1, opts.width);
    };
    if (!int_changes.empty()) {
        out.mu_star_small = refine(f_int, s, int_changes.front(), true);
        out.mu_star = refine(f_int, s, int_changes.back(), true);
    }
    if (!max_changes.empty()) out.mu_hat = refine(f_max, s, max_changes.front(), false);

    if (!opts.lambda_scan) return out;

    out.lambda_table.resize(s.size());
    LambdaStarOptions lopts;
    parallel_for(s.size(), opts.jobs, [&](std::size_t i) {
        LambdaSample ls;
        ls.mu = s[i].mu;
        if (out.mu_hat.found && s[i].mu > out.mu_hat.value - 1e-3 && s[i].mu < out.mu_hat.value) {
            // Inside the blow-up cap; left out of the sup/inf scans.
            ls.defined = false;
        } else {
            const auto l = lambda_star(s[i].mu, b, gamma, hab, lopts);
            ls.defined = l.defined;
            ls.value = l.value;
        }
        out.lambda_table[i] = ls;
    });
    auto lambda_at = [&](double mu) {
        const auto l = lambda_star(mu, b, gamma, hab, lopts);
        return l.defined ? l.value : 0.0;
    };

    // ν*: sup over 0 < μ ≤ μ^*.
    if (out.mu_star.found) {
        const auto& t = out.lambda_table;
        std::size_t best = t.size();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].defined || t[i].mu > out.mu_star.value) continue;
            if (best == t.size() || t[i].value > t[best].value) best = i;
        }
        if (best < t.size() && t[best].value > 0.0) {
            out.sup_lambda = t[best].value;
            out.sup_lambda_mu = t[best].mu;
            if (best > 0 && best + 1 < t.size() && t[best + 1].mu <= out.mu_star.value) {
                const auto [mu, val] = golden_max_log(lambda_at, t[best - 1].mu, t[best + 1].mu, 1e-4);
                if (val > out.sup_lambda) {
                    out.sup_lambda = val;
                    out.sup_lambda_mu = mu;
                }
            }
            out.nu_star = 1.0 / out.sup_lambda;
        }
    }

    // ν̂: inf over 0 < μ < μ̂ - 1e-3, meaningful when λ* stays positive there.
    if (out.mu_hat.found && !out.mu_star.found) {
        const auto& t = out.lambda_table;
        std::size_t best = t.size();
        bool positive = true;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].mu >= out.mu_hat.value - 1e-3) continue;
            if (!t[i].defined || !(t[i].value > 0.0)) {
                positive = false;
                continue;
            }
            if (best == t.size() || t[i].value < t[best].value) best = i;
        }
        if (positive && best < t.size()) {
            out.inf_lambda = t[best].value;
            out.inf_lambda_mu = t[best].mu;
            if (best > 0 && best + 1 < t.size() && t[best + 1].mu < out.mu_hat.value - 1e-3) {
                auto neg = [&](double mu) { return -lambda_at(mu); };
                const auto [mu, val] = golden_max_log(neg, t[best - 1].mu, t[best + 1].mu, 1e-4);
                if (-val < out.inf_lambda) {
                    out.inf_lambda = -val;
                    out.inf_lambda_mu = mu;
                }
            }
            out.nu_hat = 1.0 / out.inf_lambda;
        }
    }
    return out;
}

}  // namespace advstab
