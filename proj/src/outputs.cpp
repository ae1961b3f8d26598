#include <advstab/error.hpp>
#include <advstab/outputs.hpp>

#include <cmath>
#include <limits>

namespace advstab {

RegionLayout parse_layout(const std::string& s) {
    if (s == "long") return RegionLayout::Long;
    if (s == "matrix") return RegionLayout::Matrix;
    throw InputError("cli", "unknown layout '" + s + "' (expected long or matrix)");
}

Report sweep_report(const RegionMap& map, const std::optional<GammaThresholds>& thresholds, RegionLayout layout) {
    Report rep("sweep");
    auto& m = rep.meta();
    m["nu"] = map.predator.nu;
    m["b"] = map.predator.b;
    m["gamma"] = map.predator.gamma;
    if (thresholds) {
        m["regime"] = regime_name(gamma_regime(map.predator.gamma, *thresholds));
        m["gamma1"] = thresholds->gamma1;
        m["gamma2"] = thresholds->gamma2;
        m["gamma3"] = thresholds->gamma3;
        m["gamma4"] = thresholds->gamma4;
    }
    m["columns"] = map.mu_samples.size();
    m["q_resolution"] = map.q_fractions.size();
    int unstable = 0, stable = 0, marginal = 0, failed = 0;
    for (const auto& col : map.cells) {
        for (const auto& c : col) {
            if (c.failed) ++failed;
            else if (c.verdict == Verdict::Unstable) ++unstable;
            else if (c.verdict == Verdict::Stable) ++stable;
            else ++marginal;
        }
    }
    m["unstable_cells"] = unstable;
    m["stable_cells"] = stable;
    m["marginal_cells"] = marginal;
    m["failed_cells"] = failed;
    m["columns_monotone"] = map.columns_monotone();
    m["mu_samples"] = map.mu_samples;
    m["q_fractions"] = map.q_fractions;
    m["qstar_curve"] = map.qstar_curve;
    auto boundary = nlohmann::ordered_json::array();
    auto transitions = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < map.boundary.size(); ++i) {
        if (map.boundary[i]) boundary.push_back(*map.boundary[i]);
        else boundary.push_back(nullptr);
        transitions.push_back(map.transitions(i));
    }
    m["boundary_curve"] = boundary;
    m["transitions"] = transitions;
    auto failures = nlohmann::ordered_json::array();
    for (const auto& f : map.failures) {
        failures.push_back({{"column", f.column}, {"row", f.row}, {"message", f.message}});
    }
    m["failures"] = failures;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (layout == RegionLayout::Long) {
        std::vector<double> mu, q, sigma;
        std::vector<std::string> verdict;
        for (std::size_t i = 0; i < map.cells.size(); ++i) {
            for (const auto& c : map.cells[i]) {
                mu.push_back(map.mu_samples[i]);
                q.push_back(c.q);
                sigma.push_back(c.failed ? nan : c.sigma);
                verdict.push_back(c.failed ? "Failed" : verdict_name(c.verdict));
            }
        }
        rep.add_column("mu", mu);
        rep.add_column("q", q);
        rep.add_column("sigma", sigma);
        rep.add_column("verdict", verdict);
    } else {
        rep.add_column("mu", map.mu_samples);
        rep.add_column("qstar", map.qstar_curve);
        std::vector<double> qt;
        for (const auto& b : map.boundary) qt.push_back(b ? *b : nan);
        rep.add_column("q_tilde", qt);
        for (std::size_t j = 0; j < map.q_fractions.size(); ++j) {
            std::vector<double> s;
            for (const auto& col : map.cells) s.push_back(col[j].failed ? nan : col[j].sigma);
            rep.add_column("sigma_" + std::to_string(j), s);
        }
    }
    return rep;
}

}  // namespace advstab
