#include "akmmd/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "akmmd/math_util.hpp"

namespace akmmd {

void SamplerParams::validate_basic() const {
    if (!(h > 0)) throw std::invalid_argument("SamplerParams: h must be > 0");
    if (!(lambda >= 1)) throw std::invalid_argument("SamplerParams: lambda must be >= 1");
    if (!(u > 0)) throw std::invalid_argument("SamplerParams: u must be > 0");
    if (n_init < 1) throw std::invalid_argument("SamplerParams: n_init must be >= 1");
}

SamplerState::SamplerState(GridSpec grid, SamplerParams params)
    : grid_(grid),
      params_(params),
      psi_kernel_(grid.cells(), 0.0),
      min_dist_(grid),
      pa_(grid.cells(), 0.0),
      sampled_(grid.cells(), 0) {
    params_.validate_basic();
    phi_.resize(grid_.m);
    for (int d = 0; d < grid_.m; ++d)
        phi_[d] = gaussian_factor_1d(double(d) / grid_.m, params_.h);
}

void SamplerState::apply_rank1(int flat_idx, double delta_p) {
    if (delta_p == 0.0) return;
    const int m = grid_.m;
    const int pi = grid_.row(flat_idx);
    const int pj = grid_.col(flat_idx);
    double* out = psi_kernel_.data();
    for (int i = 0; i < m; ++i) {
        const double wx = delta_p * phi_[std::abs(i - pi)];
        for (int j = 0; j < m; ++j, ++out) *out += wx * phi_[std::abs(j - pj)];
    }
}

void SamplerState::ingest(int flat_idx, double p_a) {
    if (flat_idx < 0 || flat_idx >= grid_.cells())
        throw std::invalid_argument("ingest: cell index out of range");
    if (sampled_[flat_idx])
        throw std::invalid_argument("ingest: cell already sampled");
    if (!(p_a >= 0.0 && p_a <= 1.0))
        throw std::invalid_argument("ingest: p_a must lie in [0,1]");
    min_dist_.add_point(flat_idx);
    sampled_[flat_idx] = 1;
    samples_.push_back(flat_idx);
    pa_[flat_idx] = p_a;
    if (p_a > 0.0) {
        apply_rank1(flat_idx, p_a);
        ++n_positive_pa_;
    }
}

void SamplerState::refresh_probability(int flat_idx, double p_a) {
    if (flat_idx < 0 || flat_idx >= grid_.cells() || !sampled_[flat_idx])
        throw std::invalid_argument("refresh_probability: cell not sampled");
    if (!(p_a >= 0.0 && p_a <= 1.0))
        throw std::invalid_argument("refresh_probability: p_a must lie in [0,1]");
    const double old = pa_[flat_idx];
    if (old == p_a) return;
    if (old > 0.0 && p_a == 0.0) --n_positive_pa_;
    if (old == 0.0 && p_a > 0.0) ++n_positive_pa_;
    apply_rank1(flat_idx, p_a - old);
    pa_[flat_idx] = p_a;
}

double SamplerState::probability_of(int flat_idx) const { return pa_[flat_idx]; }

double SamplerState::criterion_at(int flat_idx) const {
    const double inv_m2 = 1.0 / (double(grid_.m) * grid_.m);
    const double d2 = double(min_dist_.d2_at(flat_idx)) * inv_m2;
    return (psi_kernel_[flat_idx] + params_.u) * std::pow(d2, 0.5 * params_.lambda);
}

int SamplerState::next_point() const {
    if (samples_.empty()) throw std::logic_error("next_point: no samples ingested");
    if ((int)samples_.size() >= grid_.cells())
        throw std::runtime_error("next_point: all grid cells sampled");

    // With no anomalous weight the criterion is u * f^lambda, so the argmax is
    // the exact integer maximin cell.
    if (n_positive_pa_ == 0) return min_dist_.argmax();

    const double half_lambda = 0.5 * params_.lambda;
    const double inv_m2 = 1.0 / (double(grid_.m) * grid_.m);
    const auto& d2 = min_dist_.d2();
    int best = -1;
    double best_g = -1.0;
    for (int k = 0; k < grid_.cells(); ++k) {
        if (d2[k] == 0) continue;  // sampled: criterion is 0, cannot win
        const double g = (psi_kernel_[k] + params_.u) *
                         std::pow(double(d2[k]) * inv_m2, half_lambda);
        if (g > best_g) {
            best_g = g;
            best = k;
        }
    }
    return best;
}

Field SamplerState::recompute_psi_kernel() const {
    Field out(grid_.cells(), 0.0);
    const int m = grid_.m;
    for (int s : samples_) {
        const double p = pa_[s];
        if (p == 0.0) continue;
        const int pi = grid_.row(s), pj = grid_.col(s);
        double* o = out.data();
        for (int i = 0; i < m; ++i) {
            const double wx = p * phi_[std::abs(i - pi)];
            for (int j = 0; j < m; ++j, ++o) *o += wx * phi_[std::abs(j - pj)];
        }
    }
    return out;
}

std::vector<int> init_maximin(const GridSpec& grid, int n_init) {
    if (n_init < 1) throw std::invalid_argument("init_maximin: n_init must be >= 1");
    if (n_init > grid.cells())
        throw std::invalid_argument("init_maximin: n_init exceeds grid cell count");
    std::vector<int> pts;
    pts.reserve(n_init);
    MinDistField f(grid);
    int cur = grid.center_cell();
    for (int k = 0; k < n_init; ++k) {
        pts.push_back(cur);
        f.add_point(cur);
        if (k + 1 < n_init) cur = f.argmax();
    }
    return pts;
}

double ring_radius(const SamplerParams& params, double p_a) {
    params.validate_basic();
    if (!(p_a > 0)) throw std::domain_error("ring_radius: p_a must be > 0");
    const double h = params.h, lam = params.lambda, u = params.u;
    const double arg =
        -(3.14159265358979323846 * h * h * lam * u / p_a) * std::exp(0.5 * lam);
    constexpr double kNegInvE = -0.36787944117144232;
    if (arg < kNegInvE)
        throw std::domain_error(
            "ring_radius: no ring exists (u too large relative to p_a)");
    const double w = lambert_w0(arg);
    return h * std::sqrt(lam - 2.0 * w);
}

double exploration_threshold(const SamplerParams& params, double p_a, double c) {
    if (!(c > 0)) throw std::domain_error("exploration_threshold: c must be > 0");
    const double da = ring_radius(params, p_a);
    const double lam = params.lambda;
    const double denom = da * da - lam * params.h * params.h;
    if (!(denom > 0))
        throw std::domain_error("exploration_threshold: degenerate threshold, "
                                "d_a*^2 <= lambda h^2");
    const double correction = 1.0 / (1.0 + std::exp(-c * c));
    const double factor =
        std::pow(correction * da * da / (2.0 * denom), 1.0 / lam);
    return factor * da;
}

std::vector<ParamWarning> validate_params(const SamplerParams& params) {
    std::vector<ParamWarning> out;
    const double d_star = std::pow(4.0 * 3.14159265358979323846 * params.u *
                                       std::exp(0.5 * params.lambda),
                                   -1.0 / params.lambda) *
                          params.h * std::sqrt(params.lambda);
    if (d_star < 1.0) {
        std::ostringstream os;
        os << "trap: uniform-term exploration halts near d* = " << d_star
           << " (< 1, the domain scale); once an anomaly is found the criterion "
              "can keep exploiting it and the max-min distance may stall";
        out.push_back({"trap", os.str()});
    }
    if (params.lambda < 5.0)
        out.push_back({"lambda",
                       "lambda < 5: exploration/exploitation separation is weak; "
                       "the ring structure around anomalies is shallow"});
    if (params.u >= 1e-7)
        out.push_back({"u",
                       "u >= 1e-7: large uniform weight; focused sampling engages "
                       "only once the space is explored below the ring threshold"});
    return out;
}

}  // namespace akmmd
