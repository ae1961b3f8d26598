#include <advstab/error.hpp>
#include <advstab/scenario.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace advstab;

TEST_CASE("scenario file round trip") {
    const auto s = parse_scenario(R"(# canonical pair
grid_n = 128
[profiles]
r = 1 + 0.5*x
K = 1.5*(1 + 0.5*x)   # proportional to r
[rates]
b = 2
gamma = 1.5
mu = 0.3
nu = 4
q = 0.05
[ranges]
mu_min = 0.1
mu_max = 10
mu_count = 3
q_resolution = 21
)");
    CHECK(s.grid_n == 128);
    CHECK(s.r(1.0) == doctest::Approx(1.5));
    CHECK(s.K(0.0) == doctest::Approx(1.5));
    CHECK(s.k_source == "1.5*(1 + 0.5*x)");
    CHECK(s.b == 2.0);
    CHECK(s.gamma == 1.5);
    CHECK(*s.mu == 0.3);
    CHECK(*s.nu == 4.0);
    CHECK(*s.q == 0.05);
    CHECK(s.q_resolution == 21);
    const auto mus = s.mu_samples();
    REQUIRE(mus.size() == 3);
    CHECK(mus[1] == doctest::Approx(1.0));
    CHECK(s.habitat().grid.size() == 128);
    CHECK(s.predator().nu == 4.0);
}

TEST_CASE("scenario errors carry the line number") {
    auto err = [](const char* text) {
        try {
            parse_scenario(text);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(err("[profiles]\nr = 1\nK = 1\n[rates]\nb = -1\n").find("b must be positive") != std::string::npos);
    CHECK(err("[profiles]\nr = 1 +\nK = 1\n").find("line 2") != std::string::npos);
    CHECK(err("[profiles]\nr = 1\nK = 1\n[rates]\nb = two\n").find("line 5") != std::string::npos);
    CHECK(err("[weird]\n").find("unknown section") != std::string::npos);
    CHECK(err("[profiles]\nr = 1\n").find("both r and K") != std::string::npos);
    CHECK(err("grid_n = 8\n[profiles]\nr = 1\nK = 1\n").find("grid_n") != std::string::npos);
    CHECK(err("[profiles]\nr = 1\nK = 1\n[ranges]\nmu_min = 10\nmu_max = 1\n").find("mu_max") != std::string::npos);
    CHECK(err("[profiles]\nr = 1\nK = 1\nnoequals\n").find("key = value") != std::string::npos);
}

TEST_CASE("profile from a csv path relative to the scenario") {
    const auto dir = std::filesystem::temp_directory_path() / "advstab_scenario_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "k.csv");
        f << "x,value\n0,2\n0.5,3\n1,4\n";
    }
    {
        std::ofstream f(dir / "s.cfg");
        f << "[profiles]\nr = 1\nK = k.csv\n";
    }
    const auto s = load_scenario(dir / "s.cfg");
    CHECK(s.K(0.25) == doctest::Approx(2.5));
    CHECK(s.K(1.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(load_scenario(dir / "missing.cfg"), InputError);
    std::filesystem::remove_all(dir);
}
