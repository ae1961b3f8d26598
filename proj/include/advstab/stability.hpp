#pragma once

#include <advstab/eigensolver.hpp>
#include <advstab/roots.hpp>
#include <advstab/steady.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace advstab {

enum class Verdict { Stable, Unstable, Marginal };

const char* verdict_name(Verdict v);

/// Half-width of the Marginal band around σ = 0.
inline constexpr double marginal_tolerance = 1e-8;

Verdict verdict_of(double sigma);

/// Linear stability of (θ,0): sign of σ₁(ν, q, bθ - γ).
struct StabilityVerdict {
    double mu = 0.0;
    double nu = 0.0;
    double q = 0.0;
    double sigma = 0.0;
    Verdict verdict = Verdict::Marginal;
    /// |σ| / marginal_tolerance
    double margin = 0.0;
    double qstar = 0.0;
};

struct Predator {
    double nu = 1.0;
    double b = 1.0;
    double gamma = 1.0;
};

/// Potential bθ - γ.
std::vector<double> predator_potential(const Predator& p, const std::vector<double>& theta);

/// σ₁(ν, q, bθ - γ) for a given θ.
StabilityVerdict classify_state(const SteadyState& theta, const Predator& p, const Grid& grid,
                                const EigenOptions& eig = {});

/// Solves θ(μ,q) then classifies. Throws NoSteadyStateError when q >= q*.
StabilityVerdict classify(double mu, double q, const Predator& p, const Habitat& hab,
                          std::optional<double> qstar = std::nullopt);

struct CriticalQ {
    double mu = 0.0;
    double qstar = 0.0;
    /// σ₁(ν, 0, bη - γ); no threshold exists when this is <= 0.
    double sigma_at_zero = 0.0;
    bool exists = false;
    /// Final bisection bracket: Unstable at lo, Stable at hi.
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
};

/// q̃ with σ₁(ν,q,bθ-γ) > 0 for q < q̃ and < 0 above, by bisection on the
/// sign of σ₁ with θ carried along by continuation.
CriticalQ critical_q(double mu, const Predator& p, const Habitat& hab, double width = 1e-8,
                     std::optional<double> qstar = std::nullopt);

struct RegionCell {
    double q = 0.0;
    double sigma = 0.0;
    Verdict verdict = Verdict::Marginal;
    bool failed = false;
};

struct RegionFailure {
    std::size_t column = 0;
    std::size_t row = 0;
    std::string message;
};

struct RegionMap {
    Predator predator;
    std::vector<double> mu_samples;
    /// Sampled q as fractions of q*(μ), identical for every column.
    std::vector<double> q_fractions;
    std::vector<double> qstar_curve;
    /// cells[column][row]: column per μ, row per q fraction.
    std::vector<std::vector<RegionCell>> cells;
    /// q̃(μ) refined between the bracketing cells when a column changes verdict.
    std::vector<std::optional<double>> boundary;
    std::vector<RegionFailure> failures;

    /// Count of verdict changes Unstable ↔ Stable in a column, Marginal cells skipped.
    int transitions(std::size_t column) const;
    /// No Unstable cell above a Stable one in any column.
    bool columns_monotone() const;
    bool all(Verdict v) const;
};

struct SweepOptions {
    int q_resolution = 25;
    double q_low_fraction = 0.02;
    double q_high_fraction = 0.98;
    int jobs = 1;
    /// Dense cross-check on every n-th cell (global cell index); 0 disables.
    int dense_check_every = 50;
    bool refine_boundary = true;
    double boundary_width = 1e-8;
};

RegionMap sweep_region(const std::vector<double>& mu_samples, const Predator& p, const Habitat& hab,
                       const SweepOptions& opts = {});

/// Long format "mu,q,sigma,verdict", one row per cell.
void write_region_csv(std::ostream& os, const RegionMap& map);

struct SignChanges {
    std::vector<double> mu;
    /// σ₁(ν, 0, bη - γ) at each μ.
    std::vector<double> sigma;
    std::vector<RootCertificate> locations;
    int count() const { return static_cast<int>(locations.size()); }
};

SignChanges sign_changes_in_mu(const Predator& p, const Habitat& hab, const std::vector<double>& mu_range,
                               int jobs = 1, double width = 1e-6);

}  // namespace advstab
