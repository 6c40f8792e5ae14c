#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "akmmd/estimation.hpp"
#include "akmmd/grid.hpp"

namespace akmmd {

/// Sparse kernel model of the anomaly field: coefficients at sampled points,
/// rendered to the grid and thresholded into a binary region.
struct SparseAnomalyModel {
    std::vector<Point> centers;
    Eigen::VectorXd theta;
    double h_a = 0.05;
    double gamma_a = 0.0;
    Field a_hat_grid;
    BinaryMap region;
};

struct ApgResult {
    Eigen::VectorXd theta;
    int iterations = 0;
    bool converged = false;
    double lipschitz = 0.0;
};

/// Accelerated proximal gradient for
///   argmin_theta ||e - K theta||^2 + gamma_a |theta|_1.
/// Fixed step 1/L with L the largest eigenvalue of K^T K (power iteration),
/// soft-threshold level gamma_a / (2 L), extrapolation weight
/// (t_k - 1) / t_{k+1} with t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.
/// Stops when ||theta_k - theta_{k-1}||_inf < tol.
ApgResult apg_fit(const Eigen::VectorXd& e, const Eigen::MatrixXd& K,
                  double gamma_a, double tol = 1e-10, int max_iter = 2000);

/// Largest eigenvalue of K^T K by a fixed number of power-iteration steps.
double power_iteration_sq(const Eigen::MatrixXd& K, int steps = 50);

enum class GammaMode { closed_form, monte_carlo };

struct MonteCarloGammaOpts {
    int replications = 200;
    uint64_t seed = 1;
    int max_bisect = 40;
    double w_rel = 0.005;  // "nonzero" means |a_hat_i| > w_rel * s_hat
};

/// L1 penalty from a target false-positive rate alpha.
/// closed_form: gamma_a = 2 l s Phi^-1(1 - alpha/2) with l the largest row
/// norm sqrt(sum_j K(r_j, r_i)^2).
/// monte_carlo: bisection on gamma_a until the mean fraction of rendered
/// values |a_hat| > w at the sampled points, under pure N(0, s^2) noise,
/// matches alpha within +-0.1 alpha (common random numbers across steps).
double select_sparse_gamma(const Eigen::MatrixXd& K, double s_hat, double alpha,
                           GammaMode mode,
                           const MonteCarloGammaOpts& opts = {});

/// Renders a_hat(r) = sum_k theta_k K_{h_a}(r, r_k) on the grid and thresholds
/// the anomalous region at w = 0.005 s_hat.
void render_anomaly(const Eigen::VectorXd& theta, const std::vector<Point>& centers,
                    double h_a, const GridSpec& grid, double s_hat,
                    Field& a_hat_grid, BinaryMap& region,
                    bool two_sided = false);

/// Adaptive bandwidth: c_h times the max over estimated-region cells of the
/// distance to the nearest sampled point. Empty region keeps the fallback.
double update_anomaly_bandwidth(const BinaryMap& region,
                                const std::vector<Point>& points, double c_h,
                                double fallback_h, const GridSpec& grid);

}  // namespace akmmd
