#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace akmmd {

using Point = std::array<double, 2>;

/// Measurements at sampled locations with the current fit state.
struct MeasurementSet {
    std::vector<Point> points;     // sampled locations in [0,1]^2
    std::vector<double> z;         // raw measurements
    std::vector<double> mu_hat;    // fitted mean at sampled points
    std::vector<double> residuals; // z - mu_hat
    double s_hat = 0.0;            // noise scale estimate
    std::vector<double> p_a;       // per-point anomaly probabilities

    void check_consistent() const;
};

struct RobustFitParams {
    double h_mu = 0.4;        // mean kernel bandwidth
    double lambda_s = 1.0;    // Hilbert-norm penalty weight (absolute)
    double huber_gamma = 0.2; // Huber threshold (sensor units)
    double tol_mu = 1e-5;     // sup-norm convergence tolerance on mu
    int max_iter = 200;
};

struct RobustFitResult {
    Eigen::VectorXd mu;      // fitted mean at sampled points
    Eigen::VectorXd outlier; // soft-thresholded outlier vector a
    Eigen::VectorXd coef;    // representer coefficients, mu(r) = sum c_k K(r, r_k)
    int iterations = 0;
    bool converged = false;
};

/// Gram matrix of the 2-D Gaussian kernel at the sampled points.
Eigen::MatrixXd kernel_matrix(const std::vector<Point>& pts, double h);

/// Cross-kernel matrix K(a_i, b_j).
Eigen::MatrixXd kernel_cross(const std::vector<Point>& a,
                             const std::vector<Point>& b, double h);

/// Robust kernel regression of the mean by alternating
///   mu = H (z - a),  H = K (K + lambda I)^-1,
///   a  = S(z - mu, gamma / 2)
/// until the sup-norm change of mu drops below tol_mu or max_iter is hit.
/// Equivalent to minimizing ||z - a - mu||^2 + gamma ||a||_1 + lambda ||mu||_H^2
/// over (mu, a) with mu in the kernel span.
RobustFitResult robust_fit(const std::vector<Point>& pts,
                           const Eigen::VectorXd& z,
                           const RobustFitParams& params);

/// Value of the objective above at (coef, a); oracle hook for tests.
double robust_objective(const Eigen::MatrixXd& K, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& coef, const Eigen::VectorXd& a,
                        double lambda_s, double gamma);

/// Noise scale by median absolute deviation: median(|e|) / 0.6745.
double estimate_noise(const std::vector<double>& residuals);

/// Anomaly probability of one residual: 2 Phi(|e| / s) - 1.
/// For s = 0 the limit convention applies: 1 for nonzero e, 0 for e = 0.
double anomaly_probability(double residual, double s_hat);

/// Huber threshold from a target false-positive rate:
/// gamma = 2 s Phi^-1(1 - alpha0 / 2).
double select_huber_gamma(double s_hat, double alpha0);

}  // namespace akmmd
