#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace akmmd {

/// The m x m sampling lattice. Cell (i, j), 0-based, sits at
/// ((i+1)/m, (j+1)/m) in the normalized [0,1]^2 space; all cells lie in (0,1]^2.
struct GridSpec {
    int m = 200;

    explicit GridSpec(int m_) : m(m_) {
        if (m < 2) throw std::invalid_argument("GridSpec: m must be >= 2");
    }
    GridSpec() = default;

    int cells() const { return m * m; }
    double coord(int idx) const { return double(idx + 1) / m; }
    int flat(int i, int j) const { return i * m + j; }
    int row(int k) const { return k / m; }
    int col(int k) const { return k % m; }
    double x_of(int k) const { return coord(row(k)); }
    double y_of(int k) const { return coord(col(k)); }

    /// Cell nearest to (0.5, 0.5); smallest row-major index on ties.
    int center_cell() const;
};

/// Dense m x m scalar field, row-major.
using Field = std::vector<double>;

/// Binary map over the grid.
using BinaryMap = std::vector<uint8_t>;

/// Tracks, for every grid cell, the squared distance (in integer grid units)
/// to the nearest ingested point. Exact integer arithmetic, so maximin
/// comparisons are free of floating-point ties.
class MinDistField {
public:
    explicit MinDistField(GridSpec grid);

    void add_point(int flat_idx);

    /// Squared distance in grid units (divide by m^2 for normalized units).
    const std::vector<int64_t>& d2() const { return d2_; }
    int64_t d2_at(int flat_idx) const { return d2_[flat_idx]; }
    bool empty() const { return n_points_ == 0; }
    int n_points() const { return n_points_; }
    const GridSpec& grid() const { return grid_; }

    /// argmax of the min-distance field; smallest row-major index on ties.
    int argmax() const;
    int64_t max_d2() const;
    /// Max-min distance in normalized units.
    double mmd() const;

private:
    GridSpec grid_;
    std::vector<int64_t> d2_;
    int n_points_ = 0;
};

/// Number of 4-connected components of nonzero cells.
int connected_components_4(const BinaryMap& map, const GridSpec& grid);

}  // namespace akmmd
