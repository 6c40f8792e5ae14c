#pragma once

#include <string>
#include <vector>

#include "akmmd/grid.hpp"

namespace akmmd {

/// Tuning parameters of the adaptive kernelized max-min distance criterion.
struct SamplerParams {
    double h = 0.015;   // anomaly-mixture kernel bandwidth
    double lambda = 5;  // exploration exponent, >= 1
    double u = 0.12;    // uniform mixture weight, > 0
    int n_init = 10;    // initial maximin design size

    void validate_basic() const;
};

struct ParamWarning {
    std::string code;
    std::string message;
};

/// Sequential point selector maximizing psi(r) * f(r)^lambda over the grid,
/// where psi = sum_k p_a(r_k) K_h(r, r_k) + u and f is the distance to the
/// nearest sampled point. psi's kernel part is maintained incrementally as a
/// sum of rank-1 tensor products of 1-D Gaussian factors; f is maintained by
/// the recursive min rule. Both updates are O(m^2) per ingested point.
class SamplerState {
public:
    SamplerState(GridSpec grid, SamplerParams params);

    const GridSpec& grid() const { return grid_; }
    const SamplerParams& params() const { return params_; }

    /// Adds a measured point with its anomaly probability.
    /// Throws std::invalid_argument on duplicates or p_a outside [0,1].
    void ingest(int flat_idx, double p_a);

    /// Replaces the stored anomaly probability of an already-sampled cell and
    /// applies the rank-1 psi correction.
    void refresh_probability(int flat_idx, double p_a);

    /// argmax of the criterion over all cells; smallest row-major index wins
    /// ties. Throws std::logic_error if no sample was ingested yet and
    /// std::runtime_error when all cells are exhausted.
    int next_point() const;

    /// Criterion value psi(r) * f(r)^lambda at one cell, normalized units.
    double criterion_at(int flat_idx) const;

    double psi_at(int flat_idx) const { return psi_kernel_[flat_idx] + params_.u; }
    const Field& psi_kernel() const { return psi_kernel_; }
    const MinDistField& min_dist() const { return min_dist_; }
    const std::vector<int>& samples() const { return samples_; }
    double probability_of(int flat_idx) const;
    bool is_sampled(int flat_idx) const { return sampled_[flat_idx] != 0; }
    double mmd() const { return min_dist_.mmd(); }

    /// Full O(n m^2) recomputation of psi's kernel part from the stored
    /// probabilities (reference path for the recursive update).
    Field recompute_psi_kernel() const;

private:
    void apply_rank1(int flat_idx, double delta_p);

    GridSpec grid_;
    SamplerParams params_;
    Field psi_kernel_;             // sum_k p_k K_h(., r_k)
    MinDistField min_dist_;        // squared grid-unit distances
    std::vector<double> phi_;      // 1-D factor by |index delta|
    std::vector<int> samples_;     // ingest order
    std::vector<double> pa_;       // stored p_a per cell (0 if unsampled)
    std::vector<uint8_t> sampled_;
    int n_positive_pa_ = 0;
};

/// Greedy maximin design: first point is the cell nearest the domain center,
/// each next point maximizes the minimum distance to the chosen ones.
/// Deterministic; ties go to the smallest row-major index.
std::vector<int> init_maximin(const GridSpec& grid, int n_init);

/// Radius of the local-maximum ring of the criterion around an isolated
/// anomalous point: d_a* = h sqrt(lambda - 2 W(-(pi h^2 lambda u / p_a) e^(lambda/2))).
/// Throws std::domain_error when the Lambert-W argument falls below -1/e
/// (u too large relative to p_a: no ring exists).
double ring_radius(const SamplerParams& params, double p_a);

/// Exploration threshold: the ring at d_a* is the global maximum while the
/// current max-min distance stays below
///   d~* = (1/(1+exp(-c^2)) * d_a*^2 / (2 (d_a*^2 - lambda h^2)))^(1/lambda) * d_a*.
/// Throws std::domain_error when d_a*^2 <= lambda h^2.
double exploration_threshold(const SamplerParams& params, double p_a, double c);

/// Advisory parameter checks; never throws, never mutates.
std::vector<ParamWarning> validate_params(const SamplerParams& params);

}  // namespace akmmd
