#include "akmmd/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "akmmd/math_util.hpp"
#include "akmmd/rng.hpp"

namespace akmmd {

double power_iteration_sq(const Eigen::MatrixXd& K, int steps) {
    const int n = (int)K.cols();
    if (n == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    double lam = 0.0;
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd w = K.transpose() * (K * v);
        lam = w.norm();
        if (lam == 0.0) return 0.0;
        v = w / lam;
    }
    return lam;
}

namespace {
inline double soft(double x, double t) {
    const double ax = std::abs(x) - t;
    return ax > 0 ? (x > 0 ? ax : -ax) : 0.0;
}
}  // namespace

ApgResult apg_fit(const Eigen::VectorXd& e, const Eigen::MatrixXd& K,
                  double gamma_a, double tol, int max_iter) {
    const int n = (int)e.size();
    ApgResult res;
    res.lipschitz = power_iteration_sq(K);
    if (res.lipschitz <= 0.0) {
        res.theta = Eigen::VectorXd::Zero(n);
        res.converged = true;
        return res;
    }
    const double L = res.lipschitz;
    const double thresh = gamma_a / (2.0 * L);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = theta;
    double t = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        res.iterations = it;
        Eigen::VectorXd g = x + K.transpose() * (e - K * x) / L;
        Eigen::VectorXd theta_new(n);
        for (int i = 0; i < n; ++i) theta_new[i] = soft(g[i], thresh);
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double change = (theta_new - theta).lpNorm<Eigen::Infinity>();
        x = theta_new + ((t - 1.0) / t_new) * (theta_new - theta);
        theta = std::move(theta_new);
        t = t_new;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    res.theta = std::move(theta);
    return res;
}

namespace {

// Batched FISTA over the columns of E; shared momentum schedule.
Eigen::MatrixXd apg_fit_batch(const Eigen::MatrixXd& E, const Eigen::MatrixXd& K,
                              double gamma_a, double L, double tol, int max_iter) {
    const int n = (int)E.rows(), r = (int)E.cols();
    const double thresh = gamma_a / (2.0 * L);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, r);
    Eigen::MatrixXd x = theta;
    double t = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd g = x + K.transpose() * (E - K * x) / L;
        Eigen::MatrixXd theta_new =
            g.unaryExpr([thresh](double v) { return soft(v, thresh); });
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double change = (theta_new - theta).cwiseAbs().maxCoeff();
        x = theta_new + ((t - 1.0) / t_new) * (theta_new - theta);
        theta = std::move(theta_new);
        t = t_new;
        if (change < tol) break;
    }
    return theta;
}

}  // namespace

double select_sparse_gamma(const Eigen::MatrixXd& K, double s_hat, double alpha,
                           GammaMode mode, const MonteCarloGammaOpts& opts) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("select_sparse_gamma: alpha must lie in (0,1)");
    if (!(s_hat > 0))
        throw std::invalid_argument("select_sparse_gamma: s_hat must be > 0");

    if (mode == GammaMode::closed_form) {
        double l2_max = 0.0;
        for (int i = 0; i < (int)K.cols(); ++i)
            l2_max = std::max(l2_max, K.col(i).squaredNorm());
        return 2.0 * std::sqrt(l2_max) * s_hat * normal_quantile(1.0 - alpha / 2.0);
    }

    // Monte Carlo: common random numbers across bisection steps.
    const int n = (int)K.cols();
    Rng rng(opts.seed);
    Eigen::MatrixXd E(n, opts.replications);
    for (int c = 0; c < opts.replications; ++c)
        for (int i = 0; i < n; ++i) E(i, c) = s_hat * rng.normal();

    const double L = power_iteration_sq(K);
    if (L <= 0.0) throw std::invalid_argument("select_sparse_gamma: zero kernel");
    const double w = opts.w_rel * s_hat;

    auto frac_nonzero = [&](double gamma) {
        Eigen::MatrixXd theta = apg_fit_batch(E, K, gamma, L, 1e-9, 500);
        Eigen::MatrixXd a_hat = K * theta;
        const double cnt =
            (a_hat.cwiseAbs().array() > w).cast<double>().sum();
        return cnt / (double(n) * opts.replications);
    };

    double hi = 2.0 * (K.transpose() * E).cwiseAbs().maxCoeff();
    double lo = 0.0;
    double gamma = 0.5 * hi;
    for (int it = 0; it < opts.max_bisect; ++it) {
        gamma = 0.5 * (lo + hi);
        const double f = frac_nonzero(gamma);
        if (std::abs(f - alpha) <= 0.1 * alpha) return gamma;
        if (f > alpha)
            lo = gamma;  // too many detections: raise the penalty
        else
            hi = gamma;
    }
    return gamma;
}

void render_anomaly(const Eigen::VectorXd& theta, const std::vector<Point>& centers,
                    double h_a, const GridSpec& grid, double s_hat,
                    Field& a_hat_grid, BinaryMap& region, bool two_sided) {
    if ((int)centers.size() != (int)theta.size())
        throw std::invalid_argument("render_anomaly: centers/theta size mismatch");
    if (!(h_a > 0)) throw std::invalid_argument("render_anomaly: h_a must be > 0");
    const int m = grid.m;
    a_hat_grid.assign(grid.cells(), 0.0);
    region.assign(grid.cells(), 0);

    // Beyond this radius exp() underflows to exactly 0, so the truncated sum
    // equals the full evaluation bit for bit.
    const double r_cut = h_a * std::sqrt(2.0 * 760.0);
    const int cell_r = (int)std::ceil(r_cut * m) + 1;
    const double peak = 1.0 / (2.0 * 3.14159265358979323846 * h_a * h_a);

    for (int k = 0; k < (int)theta.size(); ++k) {
        if (theta[k] == 0.0) continue;
        const double cx = centers[k][0], cy = centers[k][1];
        const int ci = (int)std::lround(cx * m) - 1;
        const int cj = (int)std::lround(cy * m) - 1;
        const int i0 = std::max(0, ci - cell_r), i1 = std::min(m - 1, ci + cell_r);
        const int j0 = std::max(0, cj - cell_r), j1 = std::min(m - 1, cj + cell_r);
        const double inv2h2 = 1.0 / (2.0 * h_a * h_a);
        for (int i = i0; i <= i1; ++i) {
            const double dx = grid.coord(i) - cx;
            double* row = a_hat_grid.data() + i * m;
            for (int j = j0; j <= j1; ++j) {
                const double dy = grid.coord(j) - cy;
                row[j] += theta[k] * peak * std::exp(-(dx * dx + dy * dy) * inv2h2);
            }
        }
    }
    const double w = 0.005 * s_hat;
    for (int k = 0; k < grid.cells(); ++k) {
        const double v = two_sided ? std::abs(a_hat_grid[k]) : a_hat_grid[k];
        region[k] = v > w ? 1 : 0;
    }
}

double update_anomaly_bandwidth(const BinaryMap& region,
                                const std::vector<Point>& points, double c_h,
                                double fallback_h, const GridSpec& grid) {
    if (!(c_h > 0))
        throw std::invalid_argument("update_anomaly_bandwidth: c_h must be > 0");
    if (points.empty() || region.empty()) return fallback_h;
    double max_d2 = -1.0;
    for (int k = 0; k < grid.cells(); ++k) {
        if (!region[k]) continue;
        const double x = grid.x_of(k), y = grid.y_of(k);
        double best = std::numeric_limits<double>::max();
        for (const auto& p : points) {
            const double dx = x - p[0], dy = y - p[1];
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) best = d2;
        }
        if (best > max_d2) max_d2 = best;
    }
    if (max_d2 < 0.0) return fallback_h;  // empty region
    return c_h * std::sqrt(max_d2);
}

}  // namespace akmmd
