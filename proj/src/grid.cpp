#include "akmmd/grid.hpp"

#include <cmath>
#include <limits>

namespace akmmd {

int GridSpec::center_cell() const {
    double best = std::numeric_limits<double>::max();
    int best_i = 0;
    for (int i = 0; i < m; ++i) {
        double d = std::abs(coord(i) - 0.5);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    return flat(best_i, best_i);
}

MinDistField::MinDistField(GridSpec grid)
    : grid_(grid), d2_(grid.cells(), std::numeric_limits<int64_t>::max()) {}

void MinDistField::add_point(int flat_idx) {
    const int m = grid_.m;
    const int pi = grid_.row(flat_idx);
    const int pj = grid_.col(flat_idx);
    int64_t* row = d2_.data();
    for (int i = 0; i < m; ++i) {
        const int64_t di2 = int64_t(i - pi) * (i - pi);
        for (int j = 0; j < m; ++j, ++row) {
            const int64_t d2 = di2 + int64_t(j - pj) * (j - pj);
            if (d2 < *row) *row = d2;
        }
    }
    ++n_points_;
}

int MinDistField::argmax() const {
    int best = 0;
    int64_t best_d2 = -1;
    for (int k = 0; k < (int)d2_.size(); ++k) {
        if (d2_[k] > best_d2) {
            best_d2 = d2_[k];
            best = k;
        }
    }
    return best;
}

int64_t MinDistField::max_d2() const { return d2_[argmax()]; }

double MinDistField::mmd() const {
    if (n_points_ == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(double(max_d2())) / grid_.m;
}

int connected_components_4(const BinaryMap& map, const GridSpec& grid) {
    const int m = grid.m;
    std::vector<uint8_t> seen(map.size(), 0);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < (int)map.size(); ++start) {
        if (!map[start] || seen[start]) continue;
        ++count;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            int i = grid.row(k), j = grid.col(k);
            const int ni[4] = {i - 1, i + 1, i, i};
            const int nj[4] = {j, j, j - 1, j + 1};
            for (int t = 0; t < 4; ++t) {
                if (ni[t] < 0 || ni[t] >= m || nj[t] < 0 || nj[t] >= m) continue;
                int nk = grid.flat(ni[t], nj[t]);
                if (map[nk] && !seen[nk]) {
                    seen[nk] = 1;
                    stack.push_back(nk);
                }
            }
        }
    }
    return count;
}

}  // namespace akmmd
