#pragma once

#include <advstab/grid.hpp>
#include <advstab/profile.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace advstab {

/// Growth rate r and carrying capacity K sampled on a grid.
struct Habitat {
    Habitat(Profile r_profile, Profile k_profile, const Grid& g);

    Grid grid;
    Profile r;
    Profile K;
    std::vector<double> r_nodes;
    std::vector<double> k_nodes;
};

/// Positive steady state of μu'' - qu' + r u(1 - u/K) = 0 with the
/// zero-flux inflow and Neumann outflow conditions. q = 0 gives η.
struct SteadyState {
    std::vector<double> field;
    double mu = 0.0;
    double q = 0.0;
    /// max_i |F_i| / (|μA_ii| + r_i): the discrete residual in units of the
    /// local stencil scale.
    double residual = 0.0;
    /// max_i |F_i| as computed.
    double raw_residual = 0.0;
    int newton_iters = 0;
    int continuation_steps = 0;
    /// Whether the time-stepping fallback ran.
    bool smoothed = false;

    double max() const;
    double min() const;
};

/// Sup norm of a nonnegative cell field from a local quadratic
/// reconstruction around the largest node. An interior peak is read off the
/// parabola through three nodes; a peak in the last cell is extrapolated to
/// x = 1 with zero slope. Converges at the rate of the nodal values, unlike
/// the plain nodal maximum.
double sup_norm(const std::vector<double>& field);

struct SteadyOptions {
    int max_newton = 100;
    /// Converged when residual <= tolerance * max(field).
    double tolerance = 1e-10;
    /// Re-solve η from the constant min K and compare.
    bool uniqueness_check = true;
    /// Continuation step as a fraction of q*.
    double step_fraction = 1.0 / 40.0;
};

/// Newton from an explicit starting field. Throws NumericalError when it
/// cannot converge to a positive solution.
SteadyState newton_steady(double mu, double q, const Habitat& hab, std::vector<double> start,
                          const SteadyOptions& opts = {});

SteadyState solve_eta(double mu, const Habitat& hab, const SteadyOptions& opts = {});
SteadyState solve_eta(double mu, const Profile& r, const Profile& K, const Grid& grid, const SteadyOptions& opts = {});

/// Moves a steady state from its q to q_target in steps no larger than
/// max_step, halving the step on Newton failure.
SteadyState continue_in_q(const Habitat& hab, const SteadyState& from, double q_target, double max_step,
                          const SteadyOptions& opts = {});

/// θ(μ,q) by continuation from η. Throws NoSteadyStateError when q >= q*.
/// `qstar` may be passed when already known.
SteadyState solve_theta(double mu, double q, const Habitat& hab, std::optional<double> qstar = std::nullopt,
                        const SteadyOptions& opts = {});
SteadyState solve_theta(double mu, double q, const Profile& r, const Profile& K, const Grid& grid,
                        const SteadyOptions& opts = {});

struct WashoutThreshold {
    double mu = 0.0;
    double qstar = 0.0;
    double bracket_width = 0.0;
    /// σ₁(μ, q*, r)
    double sigma_at_qstar = 0.0;
};

/// Bisection on q ↦ σ₁(μ,q,r), strictly decreasing. The bracket [0, q_hi]
/// doubles q_hi from 1 until σ₁ < 0.
WashoutThreshold find_qstar(double mu, std::span<const double> r_nodes, const Grid& grid, double width = 1e-10);
WashoutThreshold find_qstar(double mu, const Profile& r, const Grid& grid, double width = 1e-10);

/// |qθ(1) - ∫rθ(1 - θ/K)| for the discrete state (outflow cell value and
/// midpoint sums).
double flux_identity_residual(const SteadyState& s, const Habitat& hab);

/// "x,value" rows.
void write_field_csv(std::ostream& os, const Grid& grid, const std::vector<double>& field);

}  // namespace advstab
