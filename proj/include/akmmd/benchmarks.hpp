#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "akmmd/grid.hpp"
#include "akmmd/rng.hpp"
#include "akmmd/sampler.hpp"

namespace akmmd {

/// Common driving interface for all samplers in the experiment loop.
class PointSelector {
public:
    virtual ~PointSelector() = default;
    /// Next cell to measure. Throws std::runtime_error on exhaustion.
    virtual int next() = 0;
    /// Records a measured cell with its anomaly probability.
    virtual void ingest(int flat_idx, double p_a) = 0;
    /// Updates the anomaly probability of an already-measured cell.
    virtual void refresh_probability(int, double) {}
    virtual double mmd() const = 0;
};

/// O(1)-removal pool of not-yet-sampled cells.
class UnsampledPool {
public:
    explicit UnsampledPool(const GridSpec& grid);
    bool empty() const { return pool_.empty(); }
    bool contains(int cell) const { return pos_[cell] >= 0; }
    void remove(int cell);
    int draw(Rng& rng);

private:
    std::vector<int> pool_;
    std::vector<int> pos_;  // position in pool_, -1 if removed
};

/// Uniform sampling over the remaining cells.
class RandomSampler : public PointSelector {
public:
    RandomSampler(GridSpec grid, uint64_t seed);
    int next() override;
    void ingest(int flat_idx, double) override;
    double mmd() const override { return dist_.mmd(); }

private:
    GridSpec grid_;
    Rng rng_;
    UnsampledPool pool_;
    MinDistField dist_;
};

/// Multi-resolution grid: a 15 x 15 coarse raster first, then 5x-refined
/// lattices inside coarse cells whose sampled point reported p_a > 0.5
/// (FIFO by trigger discovery), then random fallback.
class GridSampler : public PointSelector {
public:
    GridSampler(GridSpec grid, uint64_t seed, int coarse = 15, int refine = 5,
                double trigger_pa = 0.5);
    int next() override;
    void ingest(int flat_idx, double p_a) override;
    void refresh_probability(int flat_idx, double p_a) override;
    double mmd() const override { return dist_.mmd(); }

private:
    void maybe_trigger(int flat_idx, double p_a);
    int lattice_cell(int ci, int cj) const;

    GridSpec grid_;
    int coarse_, refine_;
    double trigger_pa_;
    Rng rng_;
    UnsampledPool pool_;
    MinDistField dist_;
    std::vector<int> coarse_order_;
    size_t coarse_pos_ = 0;
    std::deque<int> fine_queue_;
    std::vector<uint8_t> triggered_;
};

/// Greedy maximin: always the cell farthest from the sampled set.
class DoeSampler : public PointSelector {
public:
    explicit DoeSampler(GridSpec grid);
    int next() override;
    void ingest(int flat_idx, double) override;
    double mmd() const override { return dist_.mmd(); }

private:
    GridSpec grid_;
    MinDistField dist_;
    int n_ = 0;
};

/// Gaussian-process posterior-variance sampling with unit-variance Gaussian
/// covariance exp(-d^2 / (2 h_gp^2)) and a noise nugget. The Cholesky factor
/// and the whitened grid cross-covariance rows are grown incrementally, so
/// each ingest costs O(n m^2).
class VarianceSampler : public PointSelector {
public:
    VarianceSampler(GridSpec grid, double h_gp = 0.1, double nugget = 1e-4);
    int next() override;
    void ingest(int flat_idx, double) override;
    double mmd() const override { return dist_.mmd(); }
    /// Posterior predictive variance field (diagnostic / tests).
    double variance_at(int flat_idx) const;

private:
    void append_point(int flat_idx);
    void rebuild();

    GridSpec grid_;
    double h_gp_, nugget_;
    int rebuilds_ = 0;
    std::vector<int> cells_;
    std::vector<double> chol_;            // packed lower triangle, row-major
    std::vector<std::vector<float>> v_;   // whitened cross-cov rows over grid
    std::vector<double> sumsq_;           // per-cell sum of squared v entries
    std::vector<uint8_t> sampled_;
    MinDistField dist_;
};

/// AKM2D criterion behind the common interface.
class AkmSelector : public PointSelector {
public:
    AkmSelector(GridSpec grid, SamplerParams params)
        : state_(grid, params) {}
    int next() override { return state_.next_point(); }
    void ingest(int flat_idx, double p_a) override { state_.ingest(flat_idx, p_a); }
    void refresh_probability(int flat_idx, double p_a) override {
        state_.refresh_probability(flat_idx, p_a);
    }
    double mmd() const override { return state_.mmd(); }
    SamplerState& state() { return state_; }

private:
    SamplerState state_;
};

}  // namespace akmmd
