#include "akmmd/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace akmmd {

UnsampledPool::UnsampledPool(const GridSpec& grid)
    : pool_(grid.cells()), pos_(grid.cells()) {
    for (int k = 0; k < grid.cells(); ++k) {
        pool_[k] = k;
        pos_[k] = k;
    }
}

void UnsampledPool::remove(int cell) {
    const int p = pos_[cell];
    if (p < 0) return;
    const int last = pool_.back();
    pool_[p] = last;
    pos_[last] = p;
    pool_.pop_back();
    pos_[cell] = -1;
}

int UnsampledPool::draw(Rng& rng) {
    if (pool_.empty()) throw std::runtime_error("sampler exhausted: no cells left");
    return pool_[rng.below(pool_.size())];
}

RandomSampler::RandomSampler(GridSpec grid, uint64_t seed)
    : grid_(grid), rng_(seed), pool_(grid), dist_(grid) {}

int RandomSampler::next() { return pool_.draw(rng_); }

void RandomSampler::ingest(int flat_idx, double) {
    pool_.remove(flat_idx);
    dist_.add_point(flat_idx);
}

GridSampler::GridSampler(GridSpec grid, uint64_t seed, int coarse, int refine,
                         double trigger_pa)
    : grid_(grid),
      coarse_(coarse),
      refine_(refine),
      trigger_pa_(trigger_pa),
      rng_(seed),
      pool_(grid),
      dist_(grid),
      triggered_(coarse * coarse, 0) {
    if (coarse_ < 1 || refine_ < 2)
        throw std::invalid_argument("GridSampler: coarse >= 1, refine >= 2");
    coarse_order_.reserve(coarse_ * coarse_);
    for (int i = 0; i < coarse_; ++i)
        for (int j = 0; j < coarse_; ++j) coarse_order_.push_back(lattice_cell(i, j));
}

int GridSampler::lattice_cell(int ci, int cj) const {
    const int m = grid_.m;
    auto snap = [&](int c) {
        int idx = (int)std::lround(double(m) * (c + 1) / (coarse_ + 1)) - 1;
        return std::min(m - 1, std::max(0, idx));
    };
    return grid_.flat(snap(ci), snap(cj));
}

int GridSampler::next() {
    while (coarse_pos_ < coarse_order_.size()) {
        const int c = coarse_order_[coarse_pos_];
        if (pool_.contains(c)) return c;
        ++coarse_pos_;
    }
    while (!fine_queue_.empty()) {
        const int c = fine_queue_.front();
        if (pool_.contains(c)) return c;
        fine_queue_.pop_front();
    }
    return pool_.draw(rng_);
}

void GridSampler::maybe_trigger(int flat_idx, double p_a) {
    if (!(p_a > trigger_pa_)) return;
    const int m = grid_.m;
    auto coarse_of = [&](int idx) {
        const double x = double(idx + 1) / m;
        int c = (int)std::lround(x * (coarse_ + 1)) - 1;
        return std::min(coarse_ - 1, std::max(0, c));
    };
    const int ci = coarse_of(grid_.row(flat_idx));
    const int cj = coarse_of(grid_.col(flat_idx));
    if (triggered_[ci * coarse_ + cj]) return;
    triggered_[ci * coarse_ + cj] = 1;

    const int half = refine_ / 2;
    const int center = lattice_cell(ci, cj);
    for (int a = -half; a <= half; ++a) {
        for (int b = -half; b <= half; ++b) {
            if (a == 0 && b == 0) continue;
            const int fi = grid_.row(center) +
                           (int)std::lround(double(a) * m / ((coarse_ + 1) * refine_));
            const int fj = grid_.col(center) +
                           (int)std::lround(double(b) * m / ((coarse_ + 1) * refine_));
            if (fi < 0 || fi >= m || fj < 0 || fj >= m) continue;
            fine_queue_.push_back(grid_.flat(fi, fj));
        }
    }
}

void GridSampler::ingest(int flat_idx, double p_a) {
    pool_.remove(flat_idx);
    dist_.add_point(flat_idx);
    maybe_trigger(flat_idx, p_a);
}

void GridSampler::refresh_probability(int flat_idx, double p_a) {
    maybe_trigger(flat_idx, p_a);
}

DoeSampler::DoeSampler(GridSpec grid) : grid_(grid), dist_(grid) {}

int DoeSampler::next() {
    if (n_ == 0) throw std::logic_error("DoeSampler: no points ingested");
    if (n_ >= grid_.cells()) throw std::runtime_error("sampler exhausted");
    return dist_.argmax();
}

void DoeSampler::ingest(int flat_idx, double) {
    dist_.add_point(flat_idx);
    ++n_;
}

VarianceSampler::VarianceSampler(GridSpec grid, double h_gp, double nugget)
    : grid_(grid),
      h_gp_(h_gp),
      nugget_(nugget),
      sumsq_(grid.cells(), 0.0),
      sampled_(grid.cells(), 0),
      dist_(grid) {
    if (!(h_gp > 0) || !(nugget > 0))
        throw std::invalid_argument("VarianceSampler: h_gp and nugget must be > 0");
}

double VarianceSampler::variance_at(int flat_idx) const {
    return 1.0 - sumsq_[flat_idx];
}

void VarianceSampler::append_point(int flat_idx) {
    const int n = (int)cells_.size();
    const double inv2h2 = 1.0 / (2.0 * h_gp_ * h_gp_);
    auto cov = [&](int a, int b) {
        const double dx = grid_.x_of(a) - grid_.x_of(b);
        const double dy = grid_.y_of(a) - grid_.y_of(b);
        return std::exp(-(dx * dx + dy * dy) * inv2h2);
    };

    // Forward-substitute the new Cholesky row.
    std::vector<double> l(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = cov(flat_idx, cells_[i]);
        const double* row_i = chol_.data() + size_t(i) * (i + 1) / 2;
        for (int j = 0; j < i; ++j) s -= row_i[j] * l[j];
        l[i] = s / row_i[i];
    }
    double d = 1.0 + nugget_;
    for (int i = 0; i < n; ++i) d -= l[i] * l[i];
    if (!(d > 1e-12)) {
        if (++rebuilds_ > 3)
            throw std::runtime_error("VarianceSampler: ill-conditioned covariance");
        nugget_ *= 10.0;
        cells_.push_back(flat_idx);
        rebuild();
        return;
    }
    l[n] = std::sqrt(d);
    chol_.insert(chol_.end(), l.begin(), l.end());

    // Whitened cross-covariance row over the grid.
    std::vector<float> v(grid_.cells());
    const int m = grid_.m;
    const int pi = grid_.row(flat_idx), pj = grid_.col(flat_idx);
    std::vector<double> kx(m), ky(m);
    for (int i = 0; i < m; ++i) {
        const double t = double(i - pi) / m;
        kx[i] = std::exp(-t * t * inv2h2);
        const double s = double(i - pj) / m;
        ky[i] = std::exp(-s * s * inv2h2);
    }
    std::vector<double> acc(grid_.cells(), 0.0);
    for (int i = 0; i < n; ++i) {
        const double li = l[i];
        if (li == 0.0) continue;
        const float* row = v_[i].data();
        for (int k = 0; k < grid_.cells(); ++k) acc[k] += li * double(row[k]);
    }
    const double inv_lnn = 1.0 / l[n];
    for (int k = 0; k < grid_.cells(); ++k) {
        const double s = kx[grid_.row(k)] * ky[grid_.col(k)] - acc[k];
        const double val = s * inv_lnn;
        v[k] = (float)val;
        sumsq_[k] += val * val;
    }
    v_.push_back(std::move(v));
    cells_.push_back(flat_idx);
}

void VarianceSampler::rebuild() {
    std::vector<int> pts = std::move(cells_);
    cells_.clear();
    chol_.clear();
    v_.clear();
    sumsq_.assign(grid_.cells(), 0.0);
    for (int c : pts) append_point(c);
}

void VarianceSampler::ingest(int flat_idx, double) {
    append_point(flat_idx);
    sampled_[flat_idx] = 1;
    dist_.add_point(flat_idx);
}

int VarianceSampler::next() {
    if (cells_.size() < 2)
        throw std::logic_error("VarianceSampler: need >= 2 measurements");
    if ((int)cells_.size() >= grid_.cells())
        throw std::runtime_error("sampler exhausted");
    int best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_.cells(); ++k) {
        if (sampled_[k]) continue;
        const double v = 1.0 - sumsq_[k];
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    return best;
}

}  // namespace akmmd
