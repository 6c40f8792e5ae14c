#include "akmmd/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace akmmd {

DetectionScores detection_metrics(const BinaryMap& est_region,
                                  const BinaryMap& true_region,
                                  const GridSpec& grid) {
    if ((int)est_region.size() != grid.cells() ||
        (int)true_region.size() != grid.cells())
        throw std::invalid_argument("detection_metrics: map size mismatch");
    int64_t est = 0, tru = 0, both = 0;
    for (int k = 0; k < grid.cells(); ++k) {
        const bool e = est_region[k] != 0, t = true_region[k] != 0;
        est += e;
        tru += t;
        both += (e && t);
    }
    DetectionScores s;
    if (est == 0 && tru == 0) {
        s.precision = s.recall = s.f_measure = 1.0;
        return s;
    }
    s.precision = est > 0 ? double(both) / est : 0.0;
    s.recall = tru > 0 ? double(both) / tru : 0.0;
    s.f_measure = (s.precision + s.recall) > 0
                      ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                      : 0.0;
    return s;
}

SamplingScores sampling_metrics(const std::vector<int>& sample_cells,
                                const BinaryMap& true_region,
                                const GridSpec& grid) {
    if (sample_cells.empty())
        throw std::invalid_argument("sampling_metrics: need >= 1 sampled point");
    SamplingScores s;
    int64_t max_all = 0, max_anom = 0;
    bool any_true = false;
    int inside = 0;
    for (int k = 0; k < grid.cells(); ++k) {
        const int i = grid.row(k), j = grid.col(k);
        int64_t best = std::numeric_limits<int64_t>::max();
        for (int c : sample_cells) {
            const int64_t di = i - grid.row(c), dj = j - grid.col(c);
            const int64_t d2 = di * di + dj * dj;
            if (d2 < best) best = d2;
        }
        if (best > max_all) max_all = best;
        if (true_region[k]) {
            any_true = true;
            if (best > max_anom) max_anom = best;
        }
    }
    for (int c : sample_cells) inside += true_region[c] ? 1 : 0;
    s.er = double(inside) / sample_cells.size();
    s.mmd = std::sqrt(double(max_all)) / grid.m;
    s.ammd = any_true ? std::sqrt(double(max_anom)) / grid.m : 0.0;
    return s;
}

MetricsTracker::MetricsTracker(GridSpec grid, const BinaryMap& true_region)
    : grid_(grid), true_region_(true_region), dist_(grid) {
    for (auto v : true_region_) true_cells_ += v ? 1 : 0;
}

void MetricsTracker::add_point(int flat_idx) {
    dist_.add_point(flat_idx);
    in_region_ += true_region_[flat_idx] ? 1 : 0;
    ++total_;
}

SamplingScores MetricsTracker::scores() const {
    SamplingScores s;
    if (total_ == 0) return s;
    s.er = double(in_region_) / total_;
    int64_t max_all = 0, max_anom = 0;
    const auto& d2 = dist_.d2();
    for (int k = 0; k < grid_.cells(); ++k) {
        if (d2[k] > max_all) max_all = d2[k];
        if (true_region_[k] && d2[k] > max_anom) max_anom = d2[k];
    }
    s.mmd = std::sqrt(double(max_all)) / grid_.m;
    s.ammd = true_cells_ > 0 ? std::sqrt(double(max_anom)) / grid_.m : 0.0;
    return s;
}

}  // namespace akmmd
