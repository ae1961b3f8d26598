#include <advstab/eigensolver.hpp>
#include <advstab/error.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace advstab;

namespace {

/// Continuous σ₁ for constant h: σ = h - q²/(4d) - d k², k ∈ (0,π) with
/// k tan(k/2) = q/(2d). Found by plain bisection.
double constant_potential_sigma(double d, double q, double h) {
    const double alpha = q / (2.0 * d);
    if (alpha == 0.0) return h;
    double lo = 0.0;
    double hi = std::numbers::pi - 1e-15;
    for (int i = 0; i < 200; ++i) {
        const double k = 0.5 * (lo + hi);
        if (k * std::tan(k / 2.0) < alpha) {
            lo = k;
        } else {
            hi = k;
        }
    }
    const double k = 0.5 * (lo + hi);
    return h - q * q / (4.0 * d) - d * k * k;
}

/// λ for m = a on (0,1/2), -b on (1/2,1): s tan(s/2) = t tanh(t/2),
/// s = √(λa), t = √(λb).
double two_step_lambda(double a, double b) {
    auto f = [&](double lambda) {
        const double s = std::sqrt(lambda * a);
        const double t = std::sqrt(lambda * b);
        return s * std::tan(s / 2.0) - t * std::tanh(t / 2.0);
    };
    double lo = 1e-9;
    double hi = std::numbers::pi * std::numbers::pi / a * (1.0 - 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("constant potential without advection") {
    const Grid g(64);
    const auto pair = principal_eigen(assemble(1.0, 0.0, Profile::constant(0.7), g));
    CHECK(pair.sigma1 == doctest::Approx(0.7).epsilon(1e-10));
    for (double v : pair.phi1) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant potential with advection matches the closed form") {
    for (const auto& [d, q] : {std::pair{1.0, 0.5}, std::pair{0.1, 1.0}, std::pair{2.0, 3.0}}) {
        const double exact = constant_potential_sigma(d, q, 0.3);
        const double s128 = sigma1(d, q, Profile::constant(0.3), Grid(128));
        const double s256 = sigma1(d, q, Profile::constant(0.3), Grid(256));
        INFO("d=" << d << " q=" << q << " exact=" << exact << " s256=" << s256);
        CHECK(std::abs(s256 - exact) <= 1e-4 * std::max(1.0, std::abs(exact)));
        const double order = std::log(std::abs(s128 - exact) / std::abs(s256 - exact)) / std::log(2.0);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("inverse iteration agrees with the dense solve on random triples") {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> logd(-2.0, 2.0);
    std::uniform_real_distribution<double> uq(0.0, 3.0);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const Grid g(256);
    for (int t = 0; t < 20; ++t) {
        const double d = std::pow(10.0, logd(rng));
        const double q = uq(rng);
        std::vector<double> h(256);
        const double a = coef(rng);
        const double b = coef(rng);
        for (int i = 0; i < 256; ++i) h[static_cast<std::size_t>(i)] = a + b * std::sin(3.0 * g.node(i));
        const auto op = assemble(d, q, h, g);
        EigenOptions opts;
        opts.dense_cross_check = false;
        const auto ii = principal_eigen(op, opts);
        const auto dense = principal_eigen_dense(op);
        INFO("d=" << d << " q=" << q);
        CHECK(std::abs(ii.sigma1 - dense.sigma1) <= 1e-10 * std::max(1.0, std::abs(dense.sigma1)));
        CHECK(rayleigh_quotient(ii.phi1, op) == doctest::Approx(ii.sigma1).epsilon(1e-9));
        for (double v : ii.phi1) CHECK(v > 0.0);
        CHECK(*std::max_element(ii.phi1.begin(), ii.phi1.end()) == 1.0);
    }
}

TEST_CASE("eigenvector spanning beyond the double range") {
    for (int n : {256, 512}) {
        const Grid g(n);
        std::vector<double> h(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = 2.0 * std::sin(3.0 * g.node(i));
        const auto op = assemble(1e-4, 1.0, h, g);
        EigenOptions opts;
        opts.dense_cross_check = false;
        const auto pair = principal_eigen(op, opts);
        const auto dense = principal_eigen_dense(op);
        INFO("n=" << n << " method=" << method_name(pair.method));
        CHECK(std::abs(pair.sigma1 - dense.sigma1) <= 1e-10 * std::abs(dense.sigma1));
        CHECK(pair.sigma1 < -100.0);
        CHECK(pair.phi1.back() == 1.0);
        for (double v : pair.phi1) CHECK(v >= 0.0);
    }
}

TEST_CASE("Rayleigh quotient bounds σ₁ from below") {
    const Grid g(128);
    const auto op = assemble(0.5, 1.0, parse_profile("1+x"), g);
    const double s = principal_eigen(op).sigma1;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> w(128);
        for (auto& v : w) v = u(rng);
        CHECK(rayleigh_quotient(w, op) <= s + 1e-6);
    }
    CHECK_THROWS_AS(rayleigh_quotient(std::vector<double>(128, 0.0), op), InputError);
    CHECK_THROWS_AS(rayleigh_quotient(std::vector<double>(10, 1.0), op), InputError);
}

TEST_CASE("large diffusion and washout limits") {
    const Grid g(256);
    const auto h = parse_profile("1+x");
    CHECK(std::abs(sigma1(1e4, 0.5, h, g) - 1.0) <= 1e-2);
    const double s = sigma1(1.0, 0.0, h, g);
    CHECK(s > 1.0);
    CHECK(s < 2.0);
    const auto phi = principal_eigen(assemble(1.0, 0.0, h, g)).phi1;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) CHECK(phi[i] < phi[i + 1]);
    CHECK(sigma1(1.0, 0.0, parse_profile("1+x"), g) > 0.0);
    CHECK(sigma1(1.0, 1.0, Profile::constant(0.0), g) < 0.0);
    CHECK(sigma1(1e-4, 1.0, h, g) < -100.0);
    CHECK(sigma1(1.0, 50.0, h, g) < -10.0);
}

TEST_CASE("monotone decrease in q") {
    const Grid g(256);
    const auto h = parse_profile("1+x");
    double prev = sigma1(1.0, 0.0, h, g);
    for (double q : {0.5, 1.0, 2.0}) {
        const double s = sigma1(1.0, q, h, g);
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("shift of the potential shifts σ₁ exactly") {
    const Grid g(128);
    const double a = sigma1(0.3, 0.8, parse_profile("sin(3*x)"), g);
    const double b = sigma1(0.3, 0.8, parse_profile("sin(3*x)+0.25"), g);
    CHECK(b - a == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("lambda*: trivial branches") {
    const Grid g(128);
    const std::vector<double> one(128, 1.0);
    const auto pos = lambda_star_for_weight(one, g);
    CHECK(pos.defined);
    CHECK(pos.value == 0.0);
    const std::vector<double> neg(128, -0.5);
    CHECK_FALSE(lambda_star_for_weight(neg, g).defined);
}

TEST_CASE("lambda*: two routes agree on cos(pi x) - 0.2") {
    const Grid g(256);
    const auto m = evaluate(parse_profile("cos(3.141592653589793*x) - 0.2"), g);
    const auto ls = lambda_star_for_weight(m, g);
    REQUIRE(ls.defined);
    CHECK(ls.value > 0.0);
    CHECK(std::abs(ls.generalized_value - ls.bisection_value) <= 1e-6 * ls.value);
    CHECK(ls.residual <= 1e-8 * std::max(1.0, ls.value));
    double mpsi = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) mpsi += m[i] * ls.psi[i] * ls.psi[i];
    CHECK(mpsi > 0.0);
    for (double v : ls.psi) CHECK(v > 0.0);
}

TEST_CASE("lambda*: piecewise constant weight matches the transcendental equation") {
    const Grid g(256);
    std::vector<double> m(256);
    for (int i = 0; i < 256; ++i) m[static_cast<std::size_t>(i)] = g.node(i) < 0.5 ? 1.0 : -2.0;
    const double exact = two_step_lambda(1.0, 2.0);
    const auto ls = lambda_star_for_weight(m, g);
    INFO("exact " << exact << " got " << ls.value);
    CHECK(ls.value == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("lambda* against sign of σ₁(ν,0,m)") {
    const Grid g(128);
    const auto m = evaluate(parse_profile("cos(3.141592653589793*x) - 0.2"), g);
    const double lam = lambda_star_for_weight(m, g).value;
    for (double nu : {0.2 / lam, 0.9 / lam, 1.1 / lam, 5.0 / lam}) {
        const double s = sigma1(nu, 0.0, m, g);
        CHECK((s > 0.0) == (nu * lam < 1.0));
    }
}
