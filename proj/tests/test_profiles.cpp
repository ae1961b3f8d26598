#include <advstab/error.hpp>
#include <advstab/profile.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace advstab;

TEST_CASE("parse: literal and function evaluation") {
    CHECK(parse_profile("1 + 0.5*x")(0.0) == 1.0);
    CHECK(parse_profile("cos(0)")(0.37) == 1.0);
    const double expect = 2.0 + std::cos(3.141592653589793 * 1.0) / 2.0;
    CHECK(parse_profile("2 + cos(3.141592653589793*x)/2")(1.0) == expect);
    CHECK(expect == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(parse_profile("-x*-2")(0.25) == 0.5);
    CHECK(parse_profile("exp(1)")(0.0) == std::exp(1.0));
    CHECK(parse_profile("1 - 2 - 3")(0.0) == -4.0);
    CHECK(parse_profile("8/2/2")(0.0) == 2.0);
    CHECK(parse_profile("1.5e-1*x")(2.0) == 0.3);
}

TEST_CASE("parse: errors carry positions") {
    CHECK_THROWS_AS(parse_profile("1 + "), ParseError);
    CHECK_THROWS_AS(parse_profile("tan(x)"), ParseError);
    CHECK_THROWS_AS(parse_profile("y"), ParseError);
    CHECK_THROWS_AS(parse_profile("(1+x"), ParseError);
    CHECK_THROWS_AS(parse_profile("1 2"), ParseError);
    try {
        parse_profile("1 + * x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("evaluation: division by zero is reported") {
    const auto p = parse_profile("1/(x - 0.5)");
    CHECK_THROWS_AS(p(0.5), InputError);
    CHECK_THROWS_AS(evaluate(parse_profile("1/(x-0.03125)"), Grid(16)), InputError);
}

TEST_CASE("round trip through to_string") {
    for (const char* text : {"1+0.5*x", "2 + cos(3.141592653589793*x)/2", "-exp(-x*x)/(1+x)", "1/3*x - -x",
                             "sin(2*x)*cos(x)-0.1"}) {
        const auto a = parse_profile(text);
        const auto b = parse_profile(a.to_string());
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            CHECK(std::abs(a(x) - b(x)) <= 1e-14);
        }
    }
}

TEST_CASE("evaluate on grids") {
    const Grid g(16);
    for (double v : evaluate(Profile::constant(3.0), g)) CHECK(v == 3.0);
    const auto xs = evaluate_vertices(parse_profile("x"), 4);
    REQUIRE(xs.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(xs[static_cast<std::size_t>(i)] == doctest::Approx(0.25 * i));

    const Grid g32(32);
    const auto samples = evaluate(parse_profile("1+x*x"), g32);
    const std::vector<double> nodes(g32.nodes().begin(), g32.nodes().end());
    const auto table = Profile::sampled(nodes, samples);
    const auto again = evaluate(table, g32);
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(again[i] == samples[i]);
    // Linear interpolation between samples, flat outside.
    CHECK(table(0.0) == samples.front());
    const double mid = 0.5 * (nodes[3] + nodes[4]);
    CHECK(table(mid) == doctest::Approx(0.5 * (samples[3] + samples[4])));
}

TEST_CASE("csv profiles") {
    const auto path = std::filesystem::temp_directory_path() / "advstab_profile_test.csv";
    {
        std::ofstream os(path);
        os << "x,value\n0,1\n0.5,2\n1,4\n";
    }
    const auto p = Profile::from_csv(path);
    CHECK(p(0.25) == doctest::Approx(1.5));
    CHECK(p(0.75) == doctest::Approx(3.0));
    {
        std::ofstream os(path);
        os << "0.1,1\n1,2\n";
    }
    CHECK_THROWS_AS(Profile::from_csv(path), InputError);
    std::filesystem::remove(path);
}

TEST_CASE("integrals and extrema") {
    CHECK(integrate(parse_profile("1+0.5*x")) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(integrate(parse_profile("1/(1.5*(1+0.5*x))*(1+0.5*x)")) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(integrate(parse_profile("exp(x)")) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(max_value(parse_profile("2+cos(3.141592653589793*x)/2")) == doctest::Approx(2.5));
    CHECK(min_value(parse_profile("2+cos(3.141592653589793*x)/2")) == doctest::Approx(1.5));
}

TEST_CASE("hypotheses: canonical pair passes everything") {
    const auto rep = check_hypotheses(parse_profile("1+0.5*x"), parse_profile("1.5*(1+0.5*x)"), Grid(256));
    for (std::size_t i = 0; i < hypothesis_count; ++i) {
        INFO(hypothesis_name(static_cast<Hypothesis>(i)));
        CHECK(rep.checks[i].holds);
    }
    CHECK(rep.theorem_hypotheses());
    CHECK(rep.integral_gain_hypotheses());
    CHECK(rep[Hypothesis::KRatioBounded].margin == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(rep[Hypothesis::KMinAtLeastOne].margin == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("hypotheses: constants fail non-constancy") {
    const auto rep = check_hypotheses(Profile::constant(1.0), Profile::constant(1.0), Grid(64));
    CHECK_FALSE(rep[Hypothesis::RNonConstant].holds);
    CHECK_FALSE(rep[Hypothesis::KNonConstant].holds);
    CHECK_FALSE(rep.theorem_hypotheses());
}

TEST_CASE("hypotheses: cosine carrying capacity breaks the r/K sign condition") {
    const auto rep = check_hypotheses(parse_profile("1+x"), parse_profile("2+cos(3.141592653589793*x)/2"), Grid(256));
    CHECK_FALSE(rep[Hypothesis::ROverKNonIncreasing].holds);
    CHECK(rep[Hypothesis::RNonDecreasing].holds);
    CHECK(rep[Hypothesis::KRatioBounded].holds);
}

TEST_CASE("hypotheses: flags with room to spare survive a small perturbation of K") {
    const auto r = parse_profile("1+x");
    const auto k = parse_profile("2+cos(3.141592653589793*x)/2");
    const auto k2 = parse_profile("(1+1e-6)*(2+cos(3.141592653589793*x)/2)");
    const auto a = check_hypotheses(r, k, Grid(128));
    const auto b = check_hypotheses(r, k2, Grid(128));
    for (std::size_t i = 0; i < hypothesis_count; ++i) {
        if (std::abs(a.checks[i].margin) > 1e-3) CHECK(a.checks[i].holds == b.checks[i].holds);
    }
}
