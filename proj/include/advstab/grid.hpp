#pragma once

#include <span>
#include <vector>

namespace advstab {

/// Uniform cell-centred grid on [0,1]: node i sits at (i + 1/2)/n.
class Grid {
public:
    static constexpr int min_cells = 16;

    explicit Grid(int cells);

    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    double dx() const noexcept { return dx_; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Midpoint-rule integral of a grid function.
    double integrate(std::span<const double> values) const;

    bool operator==(const Grid& other) const noexcept { return nodes_.size() == other.nodes_.size(); }

private:
    double dx_;
    std::vector<double> nodes_;
};

Grid build_grid(int cells);

}  // namespace advstab
