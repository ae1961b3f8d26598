#include <advstab/grid.hpp>

#include <advstab/error.hpp>

#include <string>

namespace advstab {

Grid::Grid(int cells) : dx_(0.0) {
    if (cells < min_cells) {
        throw InputError("discretization", "grid needs at least " + std::to_string(min_cells) +
                                               " cells, got " + std::to_string(cells));
    }
    dx_ = 1.0 / cells;
    nodes_.resize(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) {
        nodes_[static_cast<std::size_t>(i)] = (i + 0.5) * dx_;
    }
}

double Grid::integrate(std::span<const double> values) const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * dx_;
}

Grid build_grid(int cells) { return Grid(cells); }

}  // namespace advstab
