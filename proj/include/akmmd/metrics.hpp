#pragma once

#include <vector>

#include "akmmd/estimation.hpp"
#include "akmmd/grid.hpp"

namespace akmmd {

/// Per-iteration evaluation record.
struct MetricsRecord {
    int n_points = 0;
    double precision = 0, recall = 0, f_measure = 0;
    double er = 0;            // fraction of sampled points inside the true region
    double ammd = 0, mmd = 0; // anomaly / global max-min distances
    double s_hat = 0, gamma_a = 0, h_a = 0;
    double wall_ms = 0;
    int warn = 0;
};

struct DetectionScores {
    double precision = 0, recall = 0, f_measure = 0;
};

/// Pixel-level precision / recall / F against the ground truth.
/// Empty-denominator conventions: both maps empty -> (1,1,1); estimate empty,
/// truth nonempty -> (0,0,0); estimate nonempty, truth empty -> (0,0,0).
DetectionScores detection_metrics(const BinaryMap& est_region,
                                  const BinaryMap& true_region,
                                  const GridSpec& grid);

struct SamplingScores {
    double er = 0, ammd = 0, mmd = 0;
};

/// ER, AMMD and MMD of a sampled-point set, by exhaustive scan.
/// Distances are in normalized [0,1]^2 units. AMMD is 0 for an empty truth.
SamplingScores sampling_metrics(const std::vector<int>& sample_cells,
                                const BinaryMap& true_region,
                                const GridSpec& grid);

/// Incremental ER/AMMD/MMD tracker for per-iteration recording; equals
/// sampling_metrics on the same point set.
class MetricsTracker {
public:
    MetricsTracker(GridSpec grid, const BinaryMap& true_region);
    void add_point(int flat_idx);
    SamplingScores scores() const;

private:
    GridSpec grid_;
    BinaryMap true_region_;
    MinDistField dist_;
    int64_t true_cells_ = 0;
    int in_region_ = 0;
    int total_ = 0;
};

}  // namespace akmmd
