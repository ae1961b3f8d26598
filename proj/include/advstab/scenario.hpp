#pragma once

#include <advstab/profile.hpp>
#include <advstab/stability.hpp>
#include <advstab/steady.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace advstab {

/// Parsed scenario file:
///
///     grid_n = 256
///     [profiles]
///     r = 1 + 0.5*x
///     K = k_table.csv        # relative to the scenario file
///     [rates]
///     b = 1
///     gamma = 1
///     mu = 1
///     nu = 1
///     q = 0.1
///     [ranges]
///     mu_min = 0.01
///     mu_max = 100
///     mu_count = 20
///     q_resolution = 25
///
/// `#` starts a comment. A profile value ending in ".csv" is a path.
struct Scenario {
    std::string r_source = "1";
    std::string k_source = "1";
    Profile r = Profile::constant(1.0);
    Profile K = Profile::constant(1.0);
    int grid_n = 256;

    double b = 1.0;
    double gamma = 1.0;
    std::optional<double> mu;
    std::optional<double> nu;
    std::optional<double> q;

    double mu_min = 0.01;
    double mu_max = 100.0;
    int mu_count = 20;
    int q_resolution = 25;
    double q_low_fraction = 0.02;
    double q_high_fraction = 0.98;
    double T = 200.0;
    std::optional<double> dt;

    Habitat habitat() const;
    Predator predator() const;
    std::vector<double> mu_samples() const;

    /// Checks positivity of rates, grid_n ≥ 16, non-empty ranges.
    void validate() const;
};

/// Throws InputError with the offending line number.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Expression or CSV path (resolved against base_dir).
Profile load_profile(const std::string& source, const std::filesystem::path& base_dir = {});

}  // namespace advstab
