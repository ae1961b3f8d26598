#include <advstab/error.hpp>
#include <advstab/thresholds.hpp>

#include <doctest.h>

#include <cmath>

using namespace advstab;

namespace {

Habitat p1(int n = 256) { return Habitat(parse_profile("1+0.5*x"), parse_profile("1.5*(1+0.5*x)"), Grid(n)); }
Habitat p2(int n = 256) { return Habitat(parse_profile("1+x"), parse_profile("2+cos(3.141592653589793*x)/2"), Grid(n)); }

}  // namespace

TEST_CASE("log range") {
    const auto r = default_mu_range();
    CHECK(r.size() >= 40);
    CHECK(r.front() == 1e-3);
    CHECK(r.back() == 1e4);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) CHECK(r[i] < r[i + 1]);
    CHECK_THROWS_AS(log_range(0.0, 1.0, 5), InputError);
}

TEST_CASE("thresholds for the canonical pair") {
    const auto hab = p1();
    const auto t = gamma_thresholds(1.0, hab, default_mu_range(), 4);
    // ∫K = 1.5 * 5/4, ∫r/∫(r/K) = (5/4)/(2/3), max K = 1.5 * 1.5
    CHECK(t.gamma1 == doctest::Approx(1.875).epsilon(1e-13));
    CHECK(t.gamma2 == doctest::Approx(1.875).epsilon(1e-13));
    CHECK(std::abs(t.gamma1 - t.gamma2) <= 1e-12);
    CHECK(t.gamma4 == doctest::Approx(2.25).epsilon(1e-13));
    CHECK(t.gamma3 > t.gamma1);
    CHECK_FALSE(t.gamma3_from_limit);
    CHECK(t.gamma3 < t.gamma4);
    // b scales every threshold.
    const auto t2 = gamma_thresholds(2.0, hab, default_mu_range(), 4);
    CHECK(t2.gamma3 == doctest::Approx(2.0 * t.gamma3).epsilon(1e-12));
}

TEST_CASE("thresholds collapse for constant profiles") {
    const Habitat hab(Profile::constant(1.0), Profile::constant(1.0), Grid(64));
    const auto t = gamma_thresholds(0.7, hab, log_range(1e-3, 1e4, 40));
    CHECK(t.gamma1 == doctest::Approx(0.7));
    CHECK(t.gamma2 == doctest::Approx(0.7));
    CHECK(t.gamma3 == doctest::Approx(0.7));
    CHECK(t.gamma4 == doctest::Approx(0.7));
}

TEST_CASE("cosine carrying capacity: the sup of the integral sits at the small-mu limit") {
    const auto t = gamma_thresholds(1.0, p2(), default_mu_range(), 4);
    CHECK(t.gamma1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.gamma4 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(t.gamma3_low_end < t.gamma1);
    CHECK(t.gamma3_from_limit);
    CHECK(t.gamma3 == t.gamma1);
    CHECK(t.gamma3 >= std::max(t.gamma1, t.gamma2) - 1e-9);
}

TEST_CASE("regime tags") {
    GammaThresholds t;
    t.gamma1 = 1.0;
    t.gamma2 = 1.2;
    t.gamma3 = 1.5;
    t.gamma4 = 2.0;
    CHECK(gamma_regime(0.5, t) == Regime::I);
    CHECK(gamma_regime(1.0, t) == Regime::I);
    CHECK(gamma_regime(1.1, t) == Regime::II);
    CHECK(gamma_regime(1.3, t) == Regime::III);
    CHECK(gamma_regime(1.75, t) == Regime::IV);
    CHECK(gamma_regime(2.0, t) == Regime::V);
    CHECK(gamma_regime(3.0, t) == Regime::V);
    CHECK(gamma_regime(1.2 + 1e-10, t) == Regime::Boundary);
    CHECK(gamma_regime(1.5 - 1e-10, t) == Regime::Boundary);
    CHECK(std::string(regime_name(Regime::Boundary)) == "BOUNDARY");
}

TEST_CASE("regime I has no integral root") {
    RootOptions o;
    o.lambda_scan = false;
    const auto s = structural_roots(1.0, 1.0, p1(), default_mu_range(), o);
    CHECK(s.integral_sign_changes == 0);
    CHECK_FALSE(s.mu_star.found);
    CHECK_FALSE(s.mu_hat.found);
}

TEST_CASE("regime IV: unique mu-hat with certificate, lambda* blow-up") {
    const auto hab = p1();
    RootOptions o;
    o.jobs = 4;
    const auto s = structural_roots(1.0, 1.95, hab, default_mu_range(), o);
    CHECK(s.maximum_sign_changes == 1);
    CHECK(s.integral_sign_changes == 0);
    REQUIRE(s.mu_hat.found);
    CHECK(s.mu_hat.hi - s.mu_hat.lo <= 1e-6);
    CHECK(s.mu_hat.f_lo > 0.0);
    CHECK(s.mu_hat.f_hi < 0.0);
    REQUIRE(s.nu_hat.has_value());
    CHECK(*s.nu_hat > 0.0);
    CHECK(std::isfinite(*s.nu_hat));
    double prev = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        const double l = lambda_star(s.mu_hat.value - delta, 1.0, 1.95, hab).value;
        CHECK(l > prev);
        prev = l;
    }
    CHECK(prev > 1e3);
}

TEST_CASE("mu-hat decreases as gamma increases") {
    const auto hab = p2();
    RootOptions o;
    o.lambda_scan = false;
    const auto a = structural_roots(1.0, 2.2, hab, default_mu_range(), o);
    const auto b = structural_roots(1.0, 2.3, hab, default_mu_range(), o);
    REQUIRE(a.mu_hat.found);
    REQUIRE(b.mu_hat.found);
    CHECK(b.mu_hat.value < a.mu_hat.value);
}

TEST_CASE("regime III: two integral roots and a finite nu-star") {
    const auto hab = p1();
    RootOptions o;
    o.jobs = 4;
    const auto s = structural_roots(1.0, 1.878, hab, default_mu_range(), o);
    CHECK(s.integral_sign_changes >= 2);
    REQUIRE(s.mu_star.found);
    CHECK(s.mu_star_small.value < s.mu_star.value);
    REQUIRE(s.mu_hat.found);
    CHECK(s.mu_star.value < s.mu_hat.value);
    // b∫η = γ at the certified root.
    const auto eta = solve_eta(s.mu_star.value, hab);
    CHECK(std::abs(hab.grid.integrate(eta.field) - 1.878) <= 1e-6 * 1.878);
    REQUIRE(s.nu_star.has_value());
    CHECK(*s.nu_star > 0.0);
}

TEST_CASE("lambda* vanishes exactly when the integral test passes") {
    const auto hab = p1();
    for (double mu : {0.01, 0.1, 1.0, 10.0}) {
        const auto eta = solve_eta(mu, hab);
        const double integral = hab.grid.integrate(eta.field);
        for (double gamma : {1.7, 1.878, 1.95}) {
            const auto l = lambda_star(mu, 1.0, gamma, eta, hab.grid);
            if (eta.max() - gamma <= 0.0) {
                CHECK_FALSE(l.defined);
                continue;
            }
            REQUIRE(l.defined);
            CHECK((l.value == 0.0) == (integral - gamma >= -1e-9));
        }
    }
}
