#include <advstab/dynamics.hpp>
#include <advstab/error.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace advstab;

namespace {

Habitat p1(int n = 256) { return Habitat(parse_profile("1+0.5*x"), parse_profile("1.5*(1+0.5*x)"), Grid(n)); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("single species: persistence below q*, washout above") {
    const auto hab = p1();
    const double qs = find_qstar(1.0, hab.r_nodes, hab.grid).qstar;
    const std::vector<double> u0(256, 0.1);
    SUBCASE("converges to theta") {
        for (double frac : {0.2, 0.5, 0.8}) {
            const auto th = solve_theta(1.0, frac * qs, hab, qs);
            const auto tr = integrate_single(1.0, frac * qs, hab, u0);
            CHECK(max_abs_diff(tr.u_fields.back(), th.field) <= 1e-3);
            CHECK(tr.times.size() <= 200);
            CHECK(tr.times.back() == doctest::Approx(200.0));
            CHECK(tr.v_fields.empty());
            // Mass balance at the end state.
            SteadyState end = th;
            end.field = tr.u_fields.back();
            CHECK(flux_identity_residual(end, hab) <= 1e-6);
            CHECK(std::abs(tr.u_mass.back() - tr.u_mass[tr.u_mass.size() - 2]) <= 1e-6);
        }
    }
    SUBCASE("washout") {
        const auto tr = integrate_single(1.0, 1.2 * qs, hab, u0);
        CHECK(*std::max_element(tr.u_fields.back().begin(), tr.u_fields.back().end()) <= 1e-3);
    }
}

TEST_CASE("steady state is a fixed point of the scheme") {
    const auto hab = p1();
    const auto th = solve_theta(0.3, 0.2, hab);
    const auto tr = integrate_single(0.3, 0.2, hab, th.field);
    CHECK(max_abs_diff(tr.u_fields.back(), th.field) <= 1e-6);
}

TEST_CASE("time step refinement") {
    const auto hab = p1();
    const std::vector<double> u0(256, 0.1);
    const auto a = integrate_single(1.0, 0.4, hab, u0);
    TimeOptions o;
    o.dt = 0.5 * a.dt_used;
    const auto b = integrate_single(1.0, 0.4, hab, u0, o);
    CHECK(max_abs_diff(a.u_fields.back(), b.u_fields.back()) <= 1e-6);
    // max r = 1.5, so 0.5 / slope exceeds the 0.1 cap.
    CHECK(default_time_step(hab, u0, nullptr, nullptr) == 0.1);
    CHECK(a.dt_used == doctest::Approx(0.1));
}

TEST_CASE("input and runtime errors") {
    const auto hab = p1(32);
    CHECK_THROWS_AS(integrate_single(1.0, 0.1, hab, std::vector<double>(32, 0.0)), InputError);
    CHECK_THROWS_AS(integrate_single(1.0, 0.1, hab, std::vector<double>(31, 1.0)), InputError);
    std::vector<double> neg(32, 1.0);
    neg[3] = -0.1;
    CHECK_THROWS_AS(integrate_single(1.0, 0.1, hab, neg), InputError);
    // Too large a step breaks positivity of the explicit reaction factor.
    TimeOptions big;
    big.dt = 5.0;
    big.T = 50.0;
    CHECK_THROWS_AS(integrate_single(1.0, 0.1, hab, std::vector<double>(32, 10.0), big), NumericalError);
    CHECK_THROWS_AS(invasion_test(1.0, 0.1, {1.0, 1.0, 1.0}, hab, InvasionOptions{1e-3}), InputError);
}

TEST_CASE("predator-prey system keeps both species nonnegative") {
    const auto hab = p1(64);
    const auto th = solve_theta(1.0, 0.1, hab);
    const Predator pr{1.0, 1.0, 1.0};
    const auto tr = integrate_system(1.0, 0.1, pr, hab, th.field, std::vector<double>(64, 0.01));
    CHECK(tr.has_predator());
    CHECK(tr.v_mass.size() == tr.times.size());
    for (const auto& v : tr.v_fields) {
        for (double x : v) CHECK(x >= 0.0);
    }
    // Unstable semi-trivial state: the predator grows.
    CHECK(tr.v_mass.back() > tr.v_mass.front());
}

TEST_CASE("invasion rate matches the principal eigenvalue") {
    const auto hab = p1();
    struct Point {
        double mu, nu, frac, gamma;
    };
    for (const Point pt : {Point{1, 1, 0.1, 1.0}, Point{1, 1, 0.6, 1.0}, Point{0.2, 5, 0.5, 2.3},
                           Point{0.1, 0.1, 0.05, 1.95}}) {
        const double qs = find_qstar(pt.mu, hab.r_nodes, hab.grid).qstar;
        const Predator pr{pt.nu, 1.0, pt.gamma};
        const auto v = classify(pt.mu, pt.frac * qs, pr, hab, qs);
        const auto r = invasion_test(pt.mu, pt.frac * qs, pr, hab);
        CHECK(std::abs(r.rate - v.sigma) <= 0.1 * std::abs(v.sigma));
        CHECK(sign_of(r.rate) == sign_of(v.sigma));
        CHECK(r.fit_points >= 20);
        InvasionOptions half;
        half.eps = 0.5e-6;
        const auto r2 = invasion_test(pt.mu, pt.frac * qs, pr, hab, half);
        CHECK(std::abs(r2.rate - r.rate) <= 0.02 * std::abs(r.rate));
    }
}

TEST_CASE("trajectory csv") {
    const auto hab = p1(16);
    TimeOptions o;
    o.T = 1.0;
    o.max_samples = 5;
    const auto tr = integrate_single(1.0, 0.1, hab, std::vector<double>(16, 0.5), o);
    CHECK(tr.times.size() <= 5);
    std::ostringstream os;
    write_trajectory_csv(os, hab.grid, tr);
    const auto s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(1 + 16 * tr.times.size()));
    CHECK(s.rfind("t,x,u,v\n", 0) == 0);
}
