#pragma once

#include <advstab/stability.hpp>
#include <advstab/steady.hpp>

#include <iosfwd>
#include <vector>

namespace advstab {

/// Stored samples of a time integration. v_fields and v_mass are empty for
/// single-species runs.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> u_fields;
    std::vector<std::vector<double>> v_fields;
    std::vector<double> u_mass;
    std::vector<double> v_mass;
    double dt_used = 0.0;
    int steps = 0;
    /// max|u(T) - u(T - dt)| / dt at the last step.
    double final_rate = 0.0;

    bool has_predator() const { return !v_fields.empty(); }
};

struct TimeOptions {
    double T = 200.0;
    /// 0 selects min(0.1, 0.5 / reaction slope bound).
    double dt = 0.0;
    int max_samples = 200;
};

/// IMEX: implicit in μu'' - qu' with the inflow/outflow conditions, explicit
/// in the logistic term. Throws NumericalError on a negative value below
/// -1e-12, a non-finite value, or ‖u‖∞ > 10 max K.
Trajectory integrate_single(double mu, double q, const Habitat& hab, std::vector<double> u0,
                            const TimeOptions& opts = {});

/// Predator-prey system, same splitting for both equations.
Trajectory integrate_system(double mu, double q, const Predator& p, const Habitat& hab, std::vector<double> u0,
                            std::vector<double> v0, const TimeOptions& opts = {});

/// Step used when opts.dt is zero.
double default_time_step(const Habitat& hab, const std::vector<double>& u, const std::vector<double>* v,
                         const Predator* p);

struct InvasionOptions {
    double eps = 1e-6;
    double T = 200.0;
    double dt = 0.01;
    /// Fit window: eps/window ≤ ∫v ≤ eps·window.
    double window = 100.0;
    /// Samples in the fit at minimum before eps and dt are reduced once.
    int min_points = 20;
};

struct InvasionResult {
    double rate = 0.0;
    /// Rates at dt and dt/2 (the reported rate extrapolates these linearly).
    double rate_dt = 0.0;
    double rate_half_dt = 0.0;
    double fit_start = 0.0;
    double fit_end = 0.0;
    int fit_points = 0;
    double eps = 0.0;
    double dt = 0.0;
    bool retried = false;
};

/// Starts from (θ, eps) and fits log ∫v against t by least squares over the
/// later half of the time spent inside the window.
InvasionResult invasion_test(double mu, double q, const Predator& p, const Habitat& hab,
                             const InvasionOptions& opts = {});

/// Long format "t,x,u,v" (v column empty for single-species runs).
void write_trajectory_csv(std::ostream& os, const Grid& grid, const Trajectory& tr);

}  // namespace advstab
