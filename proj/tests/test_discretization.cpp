#include <advstab/error.hpp>
#include <advstab/grid.hpp>
#include <advstab/operator.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace advstab;

TEST_CASE("grid construction") {
    const Grid g(16);
    CHECK(g.dx() == 0.0625);
    CHECK(g.node(0) == 0.03125);
    const Grid h(100);
    CHECK(h.size() == 100);
    CHECK(h.node(99) == doctest::Approx(0.995).epsilon(1e-15));
    CHECK_THROWS_AS(Grid(15), InputError);
}

TEST_CASE("assemble: argument checks") {
    const Grid g(16);
    CHECK_THROWS_AS(assemble(0.0, 0.0, Profile::constant(0.0), g), InputError);
    CHECK_THROWS_AS(assemble(-1.0, 0.0, Profile::constant(0.0), g), InputError);
    CHECK_THROWS_AS(assemble(1.0, -0.1, Profile::constant(0.0), g), InputError);
}

TEST_CASE("Neumann null vector") {
    const Grid g(16);
    const auto a = assemble(1.0, 0.0, Profile::constant(0.0), g);
    const std::vector<double> ones(16, 1.0);
    for (double v : a.apply(ones)) CHECK(v == 0.0);
}

TEST_CASE("ones vector with advection: only the inflow row sees the boundary") {
    // The inflow flux vanishes exactly, so the interior fluxes of a constant
    // are -q and cell 0 loses q/Δx; the outflow cell's -q cancels its inner face.
    const Grid g(16);
    const auto a = assemble(1.0, 0.5, Profile::constant(0.0), g);
    const std::vector<double> ones(16, 1.0);
    const auto y = a.apply(ones);
    CHECK(y[0] == doctest::Approx(-8.0).epsilon(1e-14));
    for (std::size_t i = 1; i < y.size(); ++i) CHECK(std::abs(y[i]) <= 1e-12);
    // Band sums agree with the flux form.
    for (int i = 0; i < 16; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double row = a.lower()[k] + a.diag()[k] + a.upper()[k];
        CHECK(row == doctest::Approx(y[k]).epsilon(1e-12).scale(8.0));
    }
}

TEST_CASE("shift identity") {
    const Grid g(64);
    const auto h = parse_profile("1+x*x");
    const auto a = assemble(0.7, 1.3, h, g);
    const auto b = assemble(0.7, 1.3, parse_profile("1+x*x+2.5"), g);
    const auto c = a.shifted(2.5);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(b.diag()[i] == doctest::Approx(c.diag()[i]).epsilon(1e-15));
        CHECK(b.lower()[i] == c.lower()[i]);
        CHECK(b.upper()[i] == c.upper()[i]);
    }
}

TEST_CASE("exponential weight symmetrises the operator") {
    const Grid g(64);
    const double d = 0.3;
    const double q = 1.7;
    const auto a = assemble(d, q, Profile::constant(0.0), g);
    std::vector<double> w(64);
    for (int i = 0; i < 64; ++i) w[static_cast<std::size_t>(i)] = std::exp(-q * g.node(i) / d);
    for (std::size_t i = 0; i + 1 < 64; ++i) {
        CHECK(w[i] * a.upper()[i] == doctest::Approx(w[i + 1] * a.lower()[i + 1]).epsilon(1e-13));
    }
    // Left null vector up to the inflow boundary term.
    for (std::size_t j = 0; j < 64; ++j) {
        double s = w[j] * a.diag()[j];
        if (j > 0) s += w[j - 1] * a.upper()[j - 1];
        if (j + 1 < 64) s += w[j + 1] * a.lower()[j + 1];
        if (j == 0) {
            CHECK(s == doctest::Approx(-q * w[0] / g.dx()).epsilon(1e-12));
        } else {
            CHECK(std::abs(s) <= 1e-11 * a.inf_norm());
        }
    }
}

namespace {

double interior_truncation(int n, double d, double q) {
    const Grid g(n);
    const auto h = parse_profile("1+x");
    const auto a = assemble(d, q, h, g);
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) phi[static_cast<std::size_t>(i)] = std::cos(std::numbers::pi * g.node(i));
    const auto y = a.apply(phi);
    double err = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double x = g.node(i);
        const double pi = std::numbers::pi;
        const double exact = -d * pi * pi * std::cos(pi * x) + q * pi * std::sin(pi * x) + (1.0 + x) * std::cos(pi * x);
        err = std::max(err, std::abs(y[static_cast<std::size_t>(i)] - exact));
    }
    return err;
}

}  // namespace

TEST_CASE("second-order truncation error on interior nodes") {
    for (const auto& [d, q] : {std::pair{1.0, 0.5}, std::pair{0.05, 2.0}}) {
        const double e64 = interior_truncation(64, d, q);
        const double e256 = interior_truncation(256, d, q);
        const double order = std::log(e64 / e256) / std::log(4.0);
        INFO("d=" << d << " q=" << q << " order=" << order);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("Bernoulli function") {
    CHECK(bernoulli(0.0) == 1.0);
    CHECK(bernoulli(1e-12) == doctest::Approx(1.0 - 0.5e-12).epsilon(1e-15));
    CHECK(bernoulli(1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-15));
    // B(-z) = B(z) + z
    for (double z : {1e-6, 0.3, 4.0, 40.0}) CHECK(bernoulli(-z) == doctest::Approx(bernoulli(z) + z).epsilon(1e-14));
    CHECK(bernoulli(800.0) >= 0.0);
}

TEST_CASE("operator exports sparse triplets") {
    const auto a = assemble(1.0, 0.5, Profile::constant(0.0), Grid(16));
    std::ostringstream os;
    a.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("row,col,value\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 1 + 16 + 2 * 15);
}
