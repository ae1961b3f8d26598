#include <advstab/eigensolver.hpp>
#include <advstab/error.hpp>
#include <advstab/steady.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace advstab;

namespace {

const char* p1_r = "1+0.5*x";
const char* p1_k = "1.5*(1+0.5*x)";
const char* p2_r = "1+x";
const char* p2_k = "2+cos(3.141592653589793*x)/2";

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Continuous washout threshold for r ≡ 1, μ = 1: σ(q) = 1 - q²/4 - k(q)²
/// with k tan(k/2) = q/2, solved by nested bisection.
double qstar_constant_r() {
    auto k_of = [](double alpha) {
        double lo = 0.0;
        double hi = std::numbers::pi - 1e-15;
        for (int i = 0; i < 200; ++i) {
            const double k = 0.5 * (lo + hi);
            (k * std::tan(k / 2.0) < alpha ? lo : hi) = k;
        }
        return 0.5 * (lo + hi);
    };
    double lo = 0.0;
    double hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double q = 0.5 * (lo + hi);
        const double k = k_of(q / 2.0);
        (1.0 - q * q / 4.0 - k * k > 0.0 ? lo : hi) = q;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("homogeneous logistic equilibrium") {
    const Grid g(64);
    const auto eta = solve_eta(1.0, Profile::constant(1.0), Profile::constant(2.0), g);
    for (double v : eta.field) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    const auto theta = solve_theta(1.0, 0.0, Profile::constant(1.0), Profile::constant(2.0), g);
    for (double v : theta.field) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("manufactured solution converges at second order") {
    // u = 1 + 0.2 cos(πx) solves μu'' + u(1 - u/K) = 0 for K = u²/(u + μu'').
    const char* k_text =
        "(1+0.2*cos(3.141592653589793*x))*(1+0.2*cos(3.141592653589793*x))/"
        "(1+0.2*cos(3.141592653589793*x) - 0.1*0.2*3.141592653589793*3.141592653589793*cos(3.141592653589793*x))";
    double errs[2];
    int k = 0;
    for (int n : {64, 128}) {
        const Grid g(n);
        const auto eta = solve_eta(0.1, Profile::constant(1.0), parse_profile(k_text), g);
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            e = std::max(e, std::abs(eta.field[static_cast<std::size_t>(i)] -
                                     (1.0 + 0.2 * std::cos(std::numbers::pi * g.node(i)))));
        }
        errs[k++] = e;
    }
    CHECK(errs[1] < 1e-4);
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
}

TEST_CASE("eta limits in mu") {
    const Grid g(256);
    const Habitat hab(parse_profile(p2_r), parse_profile(p2_k), g);
    const auto small = solve_eta(1e-3, hab);
    CHECK(max_diff(small.field, hab.k_nodes) <= 0.05);
    const auto large = solve_eta(1e4, hab);
    const double limit = integrate(hab.r) / integrate(parse_profile("(1+x)/(2+cos(3.141592653589793*x)/2)"));
    for (double v : large.field) CHECK(std::abs(v - limit) <= 0.01);
    CHECK(large.residual <= 1e-10 * large.max());
    CHECK(small.residual <= 1e-10 * small.max());
}

TEST_CASE("eta bounds and monotone maximum") {
    const Grid g(256);
    const Habitat hab(parse_profile(p2_r), parse_profile(p2_k), g);
    const double kmin = min_value(hab.K);
    const double kmax = max_value(hab.K);
    double prev = std::numeric_limits<double>::infinity();
    for (double mu : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const auto eta = solve_eta(mu, hab);
        for (double v : eta.field) {
            CHECK(v > kmin);
            CHECK(v < kmax);
        }
        CHECK(eta.max() < prev);
        prev = eta.max();
    }
}

TEST_CASE("integral gain over K under the canonical pair") {
    const Grid g(256);
    const Habitat hab(parse_profile(p1_r), parse_profile(p1_k), g);
    const double int_k = integrate(hab.K);
    for (double mu : {0.01, 0.1, 1.0, 10.0}) {
        const auto eta = solve_eta(mu, hab);
        CHECK(g.integrate(eta.field) - int_k > 0.0);
    }
}

TEST_CASE("theta at q = 0 is eta") {
    const Grid g(128);
    const Habitat hab(parse_profile(p2_r), parse_profile(p2_k), g);
    const auto eta = solve_eta(0.5, hab);
    const auto theta = solve_theta(0.5, 0.0, hab);
    CHECK(max_diff(eta.field, theta.field) <= 1e-10);
    const auto tiny = solve_theta(0.5, 1e-6, hab);
    CHECK(max_diff(eta.field, tiny.field) <= 1e-4);
}

TEST_CASE("theta large-diffusion limit") {
    const Grid g(256);
    const Habitat hab(parse_profile(p1_r), parse_profile(p1_k), g);
    const auto theta = solve_theta(1e4, 0.3, hab);
    // (∫r - q)/∫(r/K) with ∫r = 5/4 and r/K ≡ 2/3.
    const double limit = (integrate(hab.r) - 0.3) / integrate(parse_profile("(1+0.5*x)/(1.5*(1+0.5*x))"));
    CHECK(limit == doctest::Approx(1.425).epsilon(1e-12));
    for (double v : theta.field) CHECK(std::abs(v - limit) <= 0.01);
}

TEST_CASE("theta: bounds, flux identity, monotonicity in q and x") {
    const Grid g(256);
    const Habitat hab(parse_profile(p1_r), parse_profile(p1_k), g);
    const double mu = 0.5;
    const double qs = find_qstar(mu, hab.r_nodes, g).qstar;
    std::vector<double> prev = solve_eta(mu, hab).field;
    for (double frac : {0.1, 0.3, 0.6, 0.9}) {
        const auto theta = solve_theta(mu, frac * qs, hab, qs);
        CHECK(theta.residual <= 1e-10 * theta.max());
        CHECK(flux_identity_residual(theta, hab) <= 1e-8);
        for (std::size_t i = 0; i < prev.size(); ++i) CHECK(theta.field[i] < prev[i]);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) CHECK(theta.field[i] < theta.field[i + 1]);
        for (double v : theta.field) CHECK(v > 0.0);
        CHECK(theta.max() < max_value(hab.K));
        prev = theta.field;
    }
}

TEST_CASE("theta beyond washout") {
    const Grid g(128);
    const Habitat hab(parse_profile(p1_r), parse_profile(p1_k), g);
    const double qs = find_qstar(1.0, hab.r_nodes, g).qstar;
    CHECK_THROWS_AS(solve_theta(1.0, qs, hab, qs), NoSteadyStateError);
    CHECK_THROWS_AS(solve_theta(1.0, 1.5 * qs, hab), NoSteadyStateError);
}

TEST_CASE("washout threshold") {
    const Grid g(256);
    const auto w = find_qstar(1.0, Profile::constant(1.0), g);
    CHECK(std::abs(w.sigma_at_qstar) <= 1e-8);
    CHECK(w.bracket_width <= 1e-10);
    const auto ones = std::vector<double>(256, 1.0);
    CHECK(sigma1(1.0, w.qstar - 1e-3, ones, g) > 0.0);
    CHECK(sigma1(1.0, w.qstar + 1e-3, ones, g) < 0.0);
    CHECK(sigma1(1.0, w.qstar - 1e-4, ones, g) > 0.0);
    CHECK(sigma1(1.0, w.qstar + 1e-4, ones, g) < 0.0);
    CHECK(w.qstar == doctest::Approx(qstar_constant_r()).epsilon(1e-4));

    const auto base = find_qstar(1.0, parse_profile(p2_r), g);
    const auto doubled = find_qstar(1.0, parse_profile("2*(1+x)"), g);
    CHECK(doubled.qstar > base.qstar);
    CHECK(find_qstar(1e-4, parse_profile(p2_r), g).qstar <= 0.5);
    CHECK_THROWS_AS(find_qstar(1.0, Profile::constant(-1.0), g), InputError);
}

TEST_CASE("sup norm recovers the peak of a parabola") {
    const Grid g(50);
    std::vector<double> inner(50), edge(50);
    for (int i = 0; i < 50; ++i) {
        const double x = g.node(i);
        inner[static_cast<std::size_t>(i)] = 1.0 - (x - 0.413) * (x - 0.413);
        edge[static_cast<std::size_t>(i)] = 1.0 - (x - 1.0) * (x - 1.0);
    }
    CHECK(sup_norm(inner) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sup_norm(edge) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sup_norm({2.0, 1.0, 0.5}) == 2.0);
}
