#include <advstab/dynamics.hpp>
#include <advstab/error.hpp>
#include <advstab/operator.hpp>
#include <advstab/outputs.hpp>
#include <advstab/parallel.hpp>
#include <advstab/stability.hpp>
#include <advstab/thresholds.hpp>
#include <advstab/validation.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace advstab {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok) { passed = passed && ok; }
};

const char* r1 = "1+0.5*x";
const char* k1 = "1.5*(1+0.5*x)";
const char* r2 = "1+x";
const char* k2 = "2+cos(3.141592653589793*x)/2";
const char* r4 = "(1+0.5*x)*(1+0.5*x)";
const char* k4 = "1+0.5*x";

/// Simpson rule for ∫ r/K on 4096 intervals.
double integrate_ratio(const Profile& r, const Profile& K) {
    const int m = 4096;
    const auto rv = evaluate_vertices(r, m);
    const auto kv = evaluate_vertices(K, m);
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * rv[static_cast<std::size_t>(i)] / kv[static_cast<std::size_t>(i)];
    }
    return s / (3.0 * m);
}

Habitat habitat(const char* r, const char* k, int n) { return Habitat(parse_profile(r), parse_profile(k), Grid(n)); }

EigenOptions no_dense() {
    EigenOptions o;
    o.dense_cross_check = false;
    return o;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> h(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) h[static_cast<std::size_t>(i)] = f(g.node(i));
    return h;
}

// 1: inverse iteration against the dense solve.
void eigen_oracle(Outcome& o, int n, int) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> logd(-2.0, 2.0);
    std::uniform_real_distribution<double> uq(0.0, 3.0);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(1.0, 6.0);
    const Grid g(n);
    double worst_rel = 0.0;
    double worst_rq = 0.0;
    int bad = 0;
    for (int t = 0; t < 50; ++t) {
        const double d = std::pow(10.0, logd(rng));
        const double q = uq(rng);
        const double a = coef(rng), b = coef(rng), c = coef(rng), k = freq(rng);
        const auto h = sample(g, [&](double x) { return a + b * std::sin(k * x) + c * x * x; });
        const auto op = assemble(d, q, h, g);
        const auto ii = principal_eigen(op, no_dense());
        const auto dense = principal_eigen_dense(op);
        const double rel = std::abs(ii.sigma1 - dense.sigma1) / std::max(1.0, std::abs(dense.sigma1));
        const double rq = std::abs(rayleigh_quotient(ii.phi1, op) - ii.sigma1);
        worst_rel = std::max(worst_rel, rel);
        worst_rq = std::max(worst_rq, rq);
        if (!(rel <= 1e-10) || !(rq <= 1e-6)) ++bad;
    }
    o.require(bad == 0);
    o.detail << "50 triples, max |Δσ|/max(1,|σ|) = " << worst_rel << ", max |RQ - σ| = " << worst_rq
             << ", violations " << bad;
}

// 2: properties of σ₁ and φ₁.
void eigen_properties(Outcome& o, int n, int) {
    const Grid g(n);
    const auto eo = no_dense();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int v3 = 0, v4 = 0, v5 = 0, v6 = 0;
    // (iii) ordered pairs h1 <= h2, h1 != h2.
    for (int t = 0; t < 20; ++t) {
        const double d = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double q = 2.0 * u(rng);
        const double a = 2.0 * u(rng) - 1.0, b = u(rng);
        const double c = 0.01 + u(rng), x0 = u(rng), w = 0.05 + 0.3 * u(rng);
        const auto h1 = sample(g, [&](double x) { return a + b * std::cos(4.0 * x); });
        auto h2 = h1;
        for (int i = 0; i < n; ++i) {
            const double x = g.node(i);
            h2[static_cast<std::size_t>(i)] += c * std::exp(-(x - x0) * (x - x0) / (w * w));
        }
        if (!(sigma1(d, q, h1, g, eo) < sigma1(d, q, h2, g, eo))) ++v3;
    }
    // (iv) 5-point q ladders.
    const double ladder[] = {0.0, 0.25, 0.5, 1.0, 2.0};
    for (int t = 0; t < 10; ++t) {
        const double d = std::pow(10.0, -1.5 + 3.0 * u(rng));
        const double a = u(rng), b = 2.0 * u(rng) - 1.0;
        const auto h = sample(g, [&](double x) { return a + b * std::sin(3.0 * x); });
        double prev = sigma1(d, ladder[0], h, g, eo);
        for (int k = 1; k < 5; ++k) {
            const double s = sigma1(d, ladder[k], h, g, eo);
            if (!(s < prev)) ++v4;
            prev = s;
        }
    }
    // (v) diffusion limits.
    double worst_limit = 0.0;
    double worst_small = -1e300;
    for (const char* expr : {"1+x", "2*sin(3*x)", "exp(x)-1", "0.5-x*x"}) {
        const auto prof = parse_profile(expr);
        const auto h = evaluate(prof, g);
        for (double q : {0.0, 0.5, 1.0}) {
            const double err = std::abs(sigma1(1e5, q, h, g, eo) - (integrate(prof) - q));
            worst_limit = std::max(worst_limit, err);
            if (!(err <= 1e-2)) ++v5;
        }
        const double small = sigma1(1e-4, 1.0, h, g, eo);
        worst_small = std::max(worst_small, small);
        if (!(small < -100.0)) ++v5;
    }
    // (vi) monotone eigenfunction for nondecreasing h.
    struct Case {
        const char* h;
        double d, q;
    };
    for (const Case c : {Case{"x", 1.0, 0.5}, Case{"1+x", 0.1, 1.0}, Case{"exp(x)", 10.0, 0.0},
                         Case{"3*sin(1.5707963267948966*x)", 0.5, 2.0}, Case{"2*x-x*x", 0.05, 0.2}}) {
        const auto pair = principal_eigen(assemble(c.d, c.q, parse_profile(c.h), g), eo);
        for (std::size_t i = 0; i + 1 < pair.phi1.size(); ++i) {
            if (!(pair.phi1[i + 1] > pair.phi1[i])) {
                ++v6;
                break;
            }
        }
    }
    o.require(v3 == 0 && v4 == 0 && v5 == 0 && v6 == 0);
    o.detail << "violations (iii) " << v3 << "/20, (iv) " << v4 << "/40, (v) " << v5 << "/16, (vi) " << v6
             << "/5; max |σ(1e5) - (∫h - q)| = " << worst_limit << ", max σ(1e-4,1,h) = " << worst_small;
}

// 3: properties of η.
void eta_properties(Outcome& o, int n, int jobs) {
    int bound = 0, mono = 0;
    double small_err = 0.0, large_err = 0.0;
    for (auto [r, k] : {std::pair{r1, k1}, std::pair{r2, k2}}) {
        const auto hab = habitat(r, k, n);
        const double kmin = min_value(hab.K), kmax = max_value(hab.K);
        if (!(kmax <= 2.0 * kmin)) throw InputError("validation", "max K <= 2 min K does not hold");
        const std::vector<double> mus{1e-3, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4};
        std::vector<SteadyState> eta(mus.size());
        parallel_for(mus.size(), jobs, [&](std::size_t i) { eta[i] = solve_eta(mus[i], hab); });
        for (const auto& e : eta) {
            for (double v : e.field) {
                if (!(v > kmin && v < kmax)) ++bound;
            }
        }
        small_err = std::max(small_err, max_diff(eta.front().field, hab.k_nodes));
        const double limit = integrate(hab.r) / integrate_ratio(hab.r, hab.K);
        for (double v : eta.back().field) large_err = std::max(large_err, std::abs(v - limit));
        for (std::size_t i = 2; i + 2 < mus.size(); ++i) {
            if (!(eta[i].max() < eta[i - 1].max())) ++mono;
        }
    }
    o.require(bound == 0 && mono == 0 && small_err <= 0.05 && large_err <= 0.01);
    o.detail << "two profiles: bound violations " << bound << ", ‖η(1e-3) - K‖ = " << small_err
             << ", ‖η(1e4) - ∫r/∫(r/K)‖ = " << large_err << ", max η monotonicity violations " << mono;
}

// 4: properties of θ.
void theta_properties(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    const double kmin = min_value(hab.K), kmax = max_value(hab.K);
    int bound = 0, literal_lower = 0, mono = 0, nodes = 0;
    double flux = 0.0, tiny = 0.0, large = 0.0;
    const std::vector<double> mus{0.1, 1.0, 10.0};
    std::vector<Outcome> parts(mus.size());
    std::vector<int> b(mus.size()), ll(mus.size()), mo(mus.size()), nn(mus.size());
    std::vector<double> fl(mus.size()), ti(mus.size());
    parallel_for(mus.size(), jobs, [&](std::size_t m) {
        const double mu = mus[m];
        const double qs = find_qstar(mu, hab.r_nodes, hab.grid).qstar;
        const auto eta = solve_eta(mu, hab);
        auto prev = eta.field;
        for (double frac : {0.1, 0.3, 0.6, 0.9}) {
            const auto th = solve_theta(mu, frac * qs, hab, qs);
            for (std::size_t i = 0; i < th.field.size(); ++i) {
                const double v = th.field[i];
                ++nn[m];
                if (!(v > 0.0 && v < kmax && v < eta.field[i])) ++b[m];
                if (!(v > kmin)) ++ll[m];
                if (!(v < prev[i])) ++mo[m];
            }
            fl[m] = std::max(fl[m], flux_identity_residual(th, hab));
            prev = th.field;
        }
        ti[m] = max_diff(solve_theta(mu, 1e-6, hab, qs).field, eta.field);
    });
    for (std::size_t m = 0; m < mus.size(); ++m) {
        bound += b[m];
        literal_lower += ll[m];
        mono += mo[m];
        nodes += nn[m];
        flux = std::max(flux, fl[m]);
        tiny = std::max(tiny, ti[m]);
    }
    const double int_r = integrate(hab.r), int_ratio = integrate_ratio(hab.r, hab.K);
    for (double q : {0.25, 0.5, 1.0}) {
        const auto th = solve_theta(1e4, q, hab);
        const double limit = (int_r - q) / int_ratio;
        for (double v : th.field) large = std::max(large, std::abs(v - limit));
        flux = std::max(flux, flux_identity_residual(th, hab));
    }
    o.require(bound == 0 && mono == 0 && large <= 0.01 && tiny <= 1e-4 && flux <= 1e-8);
    o.detail << "0 < θ < min(max K, η) violations " << bound << "/" << nodes << " (nodes with θ <= min K: "
             << literal_lower << "), decrease-in-q violations " << mono << ", ‖θ(1e4,q) - limit‖ = " << large
             << ", ‖θ(μ,1e-6) - η‖ = " << tiny << ", max flux residual = " << flux;
}

// 5: ∫η > ∫K.
void integral_gain(Outcome& o, int n, int) {
    const auto hab = habitat(r1, k1, n);
    const double int_k = integrate(hab.K);
    o.detail << "∫η - ∫K:";
    for (double mu : {0.01, 0.1, 1.0, 10.0}) {
        const double margin = hab.grid.integrate(solve_eta(mu, hab).field) - int_k;
        o.require(margin > 0.0);
        o.detail << " μ=" << mu << ": " << margin;
    }
}

// 6: λ*.
void lambda_checks(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    const auto mus = log_range(0.01, 10.0, 10);
    std::vector<SteadyState> eta(mus.size());
    parallel_for(mus.size(), jobs, [&](std::size_t i) { eta[i] = solve_eta(mus[i], hab); });
    int zero_bad = 0, zero_cases = 0, agree_bad = 0, positive = 0, undefined = 0;
    double worst_agree = 0.0;
    for (double gamma : {1.7, 1.878, 1.95}) {
        for (std::size_t i = 0; i < mus.size(); ++i) {
            const auto l = lambda_star(mus[i], 1.0, gamma, eta[i], hab.grid);
            if (!l.defined) {
                ++undefined;
                continue;
            }
            const bool integral_test = hab.grid.integrate(eta[i].field) - gamma >= -1e-9;
            if ((l.value == 0.0) != integral_test) ++zero_bad;
            if (l.value == 0.0) ++zero_cases;
            if (l.value > 0.0) {
                ++positive;
                const double rel = std::abs(l.generalized_value - l.bisection_value) / l.value;
                worst_agree = std::max(worst_agree, rel);
                if (!(rel <= 1e-6)) ++agree_bad;
            }
        }
    }
    // Sign equivalence on a 10 x 10 (μ, ν) grid.
    const double gamma = 1.878;
    const auto nus = log_range(0.1, 10.0, 10);
    std::vector<double> lam(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const auto l = lambda_star(mus[i], 1.0, gamma, eta[i], hab.grid);
        lam[i] = l.defined ? l.value : std::numeric_limits<double>::infinity();
    }
    std::vector<int> sign_bad(mus.size()), near(mus.size());
    parallel_for(mus.size(), jobs, [&](std::size_t i) {
        const auto h = predator_potential({1.0, 1.0, gamma}, eta[i].field);
        for (double nu : nus) {
            if (std::abs(nu * lam[i] - 1.0) <= 1e-6) {
                ++near[i];
                continue;
            }
            const double s = sigma1(nu, 0.0, h, hab.grid, no_dense());
            if ((s > 0.0) != (nu * lam[i] < 1.0)) ++sign_bad[i];
        }
    });
    int sb = 0, nr = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        sb += sign_bad[i];
        nr += near[i];
    }
    o.require(zero_bad == 0 && agree_bad == 0 && sb == 0 && zero_cases > 0 && positive > 0);
    o.detail << "λ*=0 ⇔ b∫η >= γ violations " << zero_bad << " (" << zero_cases << " zero, " << positive
             << " positive, " << undefined << " undefined), two-route max rel. diff " << worst_agree
             << ", sign equivalence violations " << sb << "/100 (" << nr << " within 1e-6 of νλ* = 1 skipped)";
}

// 7: regime structure of the stability map.
void regime_reproduction(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    const auto hab4 = habitat(r4, k4, n);
    const auto t1 = gamma_thresholds(1.0, hab, default_mu_range(), jobs);
    const auto t4 = gamma_thresholds(1.0, hab4, default_mu_range(), jobs);
    const bool tags = gamma_regime(1.0, t1) == Regime::I && gamma_regime(1.26, t4) == Regime::II &&
                      gamma_regime(1.878, t1) == Regime::III && gamma_regime(1.95, t1) == Regime::IV &&
                      gamma_regime(2.3, t1) == Regime::V;
    o.require(tags);

    SweepOptions so;
    so.jobs = jobs;
    const auto mus = log_range(0.01, 100.0, 20);

    // (i) one transition per column, certified by critical_q.
    int one = 0, columns = 0, cert_bad = 0;
    bool monotone = true;
    for (double nu : {0.2, 1.0, 5.0}) {
        const Predator p{nu, 1.0, 1.0};
        const auto m = sweep_region(mus, p, hab, so);
        monotone = monotone && m.columns_monotone() && m.failures.empty();
        for (std::size_t i = 0; i < mus.size(); ++i) {
            ++columns;
            if (m.transitions(i) == 1 && m.cells[i].front().verdict == Verdict::Unstable) ++one;
        }
        if (nu != 1.0) continue;
        std::vector<int> bad(mus.size());
        parallel_for(mus.size(), jobs, [&](std::size_t i) {
            const auto c = critical_q(mus[i], p, hab, 1e-8, m.qstar_curve[i]);
            const bool ok = c.exists && c.hi - c.lo <= 1e-8 &&
                            classify(mus[i], c.value - 1e-4, p, hab, c.qstar).verdict == Verdict::Unstable &&
                            classify(mus[i], c.value + 1e-4, p, hab, c.qstar).verdict == Verdict::Stable;
            bad[i] = ok ? 0 : 1;
        });
        for (int b : bad) cert_bad += b;
    }
    o.require(one == columns && cert_bad == 0);

    // (v) all stable.
    bool v_stable = true;
    for (double nu : {0.2, 5.0}) {
        const auto m = sweep_region(mus, {nu, 1.0, 2.3}, hab, so);
        v_stable = v_stable && m.all(Verdict::Stable);
    }
    o.require(v_stable);

    // (iv)(a) all stable above ν̂.
    RootOptions ro;
    ro.jobs = jobs;
    const auto roots4 = structural_roots(1.0, 1.95, hab, default_mu_range(), ro);
    bool iv_stable = roots4.nu_hat.has_value();
    if (roots4.nu_hat) {
        for (double f : {2.0, 10.0}) {
            const auto m = sweep_region(log_range(1e-3, 1e3, 20), {f * *roots4.nu_hat, 1.0, 1.95}, hab, so);
            iv_stable = iv_stable && m.all(Verdict::Stable);
        }
    }
    o.require(iv_stable);

    // (ii) at least one sign change below μ*; (iii) at least two below μ̂.
    const auto roots2 = structural_roots(1.0, 1.26, hab4, default_mu_range(), ro);
    int count2 = 0;
    if (roots2.nu_star && roots2.mu_star.found) {
        const auto s = sign_changes_in_mu({2.0 * *roots2.nu_star, 1.0, 1.26}, hab4, default_mu_range(), jobs);
        for (const auto& l : s.locations) count2 += l.value < roots2.mu_star.value ? 1 : 0;
    }
    const auto roots3 = structural_roots(1.0, 1.878, hab, default_mu_range(), ro);
    int count3 = 0;
    if (roots3.nu_star && roots3.mu_hat.found) {
        const auto s = sign_changes_in_mu({2.0 * *roots3.nu_star, 1.0, 1.878}, hab, default_mu_range(), jobs);
        for (const auto& l : s.locations) count3 += l.value < roots3.mu_hat.value ? 1 : 0;
    }
    o.require(count2 >= 1 && count3 >= 2);

    // Maps in regimes II and III: monotone columns with an unstable region somewhere.
    // At ν = 2ν* the unstable set hugs q = 0, so the q rows start at 1e-4 q*.
    bool mixed = true;
    if (roots2.nu_star && roots3.nu_star) {
        auto low = so;
        low.q_low_fraction = 1e-4;
        const auto m2 = sweep_region(log_range(1e-3, 1e3, 20), {2.0 * *roots2.nu_star, 1.0, 1.26}, hab4, low);
        const auto m3 = sweep_region(log_range(1e-3, 1e3, 20), {2.0 * *roots3.nu_star, 1.0, 1.878}, hab, low);
        for (const auto* m : {&m2, &m3}) {
            bool any_unstable = false, any_stable_column = false;
            for (std::size_t i = 0; i < m->cells.size(); ++i) {
                any_unstable = any_unstable || m->cells[i].front().verdict == Verdict::Unstable;
                any_stable_column = any_stable_column || m->cells[i].front().verdict == Verdict::Stable;
                mixed = mixed && m->transitions(i) <= 1;
            }
            mixed = mixed && m->columns_monotone() && any_unstable && any_stable_column;
        }
    } else {
        mixed = false;
    }
    monotone = monotone && mixed;
    o.require(monotone);

    o.detail << "regime tags " << (tags ? "ok" : "wrong") << "; (i) single transition in " << one << "/" << columns
             << " columns, critical_q certificate failures " << cert_bad << "; (v) all stable "
             << (v_stable ? "yes" : "no") << "; (iv)(a) all stable for ν > ν̂ = "
             << (roots4.nu_hat ? *roots4.nu_hat : 0.0) << ": " << (iv_stable ? "yes" : "no")
             << "; (ii) sign changes below μ* " << count2 << "; (iii) below μ̂ " << count3
             << "; monotone columns and mixed II/III maps " << (monotone ? "yes" : "no");
}

// 8: λ* blows up at μ̂.
void blow_up(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    RootOptions ro;
    ro.jobs = jobs;
    ro.lambda_scan = false;
    const auto roots = structural_roots(1.0, 1.95, hab, default_mu_range(), ro);
    o.require(roots.mu_hat.found);
    if (!roots.mu_hat.found) return;
    o.detail << "μ̂ = " << roots.mu_hat.value << ", λ*(μ̂ - δ):";
    double prev = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        const auto l = lambda_star(roots.mu_hat.value - delta, 1.0, 1.95, hab);
        o.require(l.defined && l.value > prev);
        prev = l.value;
        o.detail << " δ=" << delta << ": " << l.value;
    }
    o.require(prev > 1e3);
}

// 9: nonlinear invasion against σ₁.
void invasion(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    struct Point {
        double mu, nu, frac, gamma;
    };
    const std::vector<Point> pts{{1, 1, 0.1, 1.0},      {0.1, 0.5, 0.2, 1.0},  {10, 2, 0.1, 1.0},
                                 {3, 0.2, 0.1, 1.5},    {0.5, 1, 0.05, 1.878}, {1, 1, 0.6, 1.0},
                                 {10, 2, 0.5, 1.0},     {0.05, 0.3, 0.8, 1.5}, {1, 1, 0.3, 2.3},
                                 {0.2, 5, 0.5, 2.3},    {1, 0.5, 0.1, 1.95},   {0.1, 0.1, 0.05, 1.95}};
    std::vector<double> sig(pts.size()), rate(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t i) {
        const auto& p = pts[i];
        const double qs = find_qstar(p.mu, hab.r_nodes, hab.grid).qstar;
        const Predator pr{p.nu, 1.0, p.gamma};
        sig[i] = classify(p.mu, p.frac * qs, pr, hab, qs).sigma;
        rate[i] = invasion_test(p.mu, p.frac * qs, pr, hab).rate;
    });
    int sign_ok = 0, rel_ok = 0, unstable = 0, small = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(std::abs(sig[i]) >= 1e-3)) ++small;
        const double rel = std::abs(rate[i] - sig[i]) / std::abs(sig[i]);
        worst = std::max(worst, rel);
        rel_ok += rel <= 0.1 ? 1 : 0;
        sign_ok += sign_of(rate[i]) == sign_of(sig[i]) ? 1 : 0;
        unstable += sig[i] > 0.0 ? 1 : 0;
    }
    o.require(small == 0 && rel_ok == 12 && sign_ok == 12);
    o.detail << "12 points (" << unstable << " unstable), within 10%: " << rel_ok << ", sign agreement: " << sign_ok
             << ", max relative error " << worst << ", points with |σ| < 1e-3: " << small;
}

// 10: observed grid convergence order.
void convergence(Outcome& o, int, int jobs) {
    const int ns[] = {64, 128, 256, 512};
    double worst = 1e300;
    o.detail << "orders:";
    for (auto [r, k, name] : {std::tuple{r1, k1, "P1"}, std::tuple{r2, k2, "P2"}}) {
        std::vector<double> sig(4), th(4);
        parallel_for(4, jobs, [&](std::size_t j) {
            const auto hab = habitat(r, k, ns[j]);
            sig[j] = sigma1(1.0, 0.5, hab.r_nodes, hab.grid);
            th[j] = sup_norm(solve_theta(1.0, 0.3, hab).field);
        });
        for (const auto* v : {&sig, &th}) {
            const auto& a = *v;
            const double p1 = std::log2(std::abs(a[0] - a[1]) / std::abs(a[1] - a[2]));
            const double p2 = std::log2(std::abs(a[1] - a[2]) / std::abs(a[2] - a[3]));
            worst = std::min({worst, p1, p2});
            o.detail << ' ' << name << (v == &sig ? " σ₁ " : " ‖θ‖ ") << p1 << ", " << p2 << ';';
        }
    }
    o.require(worst >= 1.8);
    o.detail << " min " << worst;
}

// 11: sweep output does not depend on the thread count.
void determinism(Outcome& o, int n, int jobs) {
    const auto hab = habitat(r1, k1, n);
    const auto t = gamma_thresholds(1.0, hab, default_mu_range(), jobs);
    const auto mus = log_range(0.01, 100.0, 12);
    auto render = [&](int j) {
        SweepOptions so;
        so.jobs = j;
        const auto m = sweep_region(mus, {1.0, 1.0, 1.0}, hab, so);
        return sweep_report(m, t, RegionLayout::Long).render(Format::Csv) +
               sweep_report(m, t, RegionLayout::Matrix).render(Format::Csv) +
               sweep_report(m, t, RegionLayout::Long).render(Format::Json);
    };
    const auto a = render(1);
    const auto b = render(8);
    const auto c = render(8);
    o.require(a == b && b == c);
    o.detail << "jobs 1 vs 8 (csv long, csv matrix, json; " << a.size() << " bytes): "
             << (a == b && b == c ? "identical" : "different");
}

struct Entry {
    int id;
    const char* name;
    void (*run)(Outcome&, int, int);
};

const Entry entries[] = {
    {1, "eigensolver oracle equivalence", eigen_oracle},
    {2, "principal eigenvalue properties", eigen_properties},
    {3, "closed-habitat steady state properties", eta_properties},
    {4, "advective steady state properties", theta_properties},
    {5, "integral gain over K", integral_gain},
    {6, "lambda* characterisation", lambda_checks},
    {7, "stability regimes", regime_reproduction},
    {8, "lambda* blow-up", blow_up},
    {9, "invasion rate vs sigma1", invasion},
    {10, "grid convergence", convergence},
    {11, "sweep determinism", determinism},
};

}  // namespace

std::vector<CriterionResult> run_validation(const ValidationOptions& opts) {
    if (opts.grid_n < 16) throw InputError("validation", "grid_n must be at least 16");
    std::vector<CriterionResult> out;
    for (const auto& e : entries) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), e.id) == opts.only.end()) continue;
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        o.detail << std::setprecision(4);
        try {
            e.run(o, opts.grid_n, std::max(1, opts.jobs));
            r.passed = o.passed;
            r.detail = o.detail.str();
        } catch (const std::exception& ex) {
            r.passed = false;
            r.detail = o.detail.str() + (o.detail.str().empty() ? "" : "; ") + "error: " + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opts.on_result) opts.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS" : "FAIL") << " [" << std::setw(2) << r.id << "] " << r.name << ": " << r.detail << " ("
       << std::fixed << std::setprecision(1) << r.seconds << " s)";
    return os.str();
}

}  // namespace advstab
