#pragma once

#include <advstab/report.hpp>
#include <advstab/stability.hpp>
#include <advstab/thresholds.hpp>

#include <optional>

namespace advstab {

enum class RegionLayout { Long, Matrix };

RegionLayout parse_layout(const std::string& s);

/// Long layout: one row per cell (mu, q, sigma, verdict). Matrix layout: one
/// row per μ with q*, q̃ and σ at every q fraction (column sigma_j for
/// fraction j). The JSON form carries the
/// regime, the q* curve and the boundary curve in the metadata.
Report sweep_report(const RegionMap& map, const std::optional<GammaThresholds>& thresholds, RegionLayout layout);

}  // namespace advstab
