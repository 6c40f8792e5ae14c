#include "akmmd/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "akmmd/math_util.hpp"

namespace akmmd {

void MeasurementSet::check_consistent() const {
    const size_t n = points.size();
    if (z.size() != n || mu_hat.size() != n || residuals.size() != n ||
        p_a.size() != n)
        throw std::logic_error("MeasurementSet: parallel array lengths differ");
    if (s_hat < 0) throw std::logic_error("MeasurementSet: s_hat < 0");
    for (double p : p_a)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::logic_error("MeasurementSet: p_a outside [0,1]");
}

Eigen::MatrixXd kernel_matrix(const std::vector<Point>& pts, double h) {
    const int n = (int)pts.size();
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = gaussian_kernel_2d_d2(0.0, h);
        for (int j = i + 1; j < n; ++j) {
            const double dx = pts[i][0] - pts[j][0];
            const double dy = pts[i][1] - pts[j][1];
            const double v = gaussian_kernel_2d_d2(dx * dx + dy * dy, h);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd kernel_cross(const std::vector<Point>& a,
                             const std::vector<Point>& b, double h) {
    Eigen::MatrixXd K((int)a.size(), (int)b.size());
    for (int i = 0; i < (int)a.size(); ++i)
        for (int j = 0; j < (int)b.size(); ++j) {
            const double dx = a[i][0] - b[j][0];
            const double dy = a[i][1] - b[j][1];
            K(i, j) = gaussian_kernel_2d_d2(dx * dx + dy * dy, h);
        }
    return K;
}

namespace {
inline double soft(double x, double t) {
    const double ax = std::abs(x) - t;
    return ax > 0 ? (x > 0 ? ax : -ax) : 0.0;
}
}  // namespace

RobustFitResult robust_fit(const std::vector<Point>& pts,
                           const Eigen::VectorXd& z,
                           const RobustFitParams& params) {
    const int n = (int)pts.size();
    if (n < 2) throw std::invalid_argument("robust_fit: need at least 2 points");
    if (!(params.lambda_s > 0))
        throw std::invalid_argument("robust_fit: lambda_s must be > 0");
    if (params.max_iter < 1)
        throw std::invalid_argument("robust_fit: max_iter must be >= 1");

    const Eigen::MatrixXd K = kernel_matrix(pts, params.h_mu);
    Eigen::MatrixXd A = K;
    A.diagonal().array() += params.lambda_s;
    Eigen::LDLT<Eigen::MatrixXd> solver(A);

    RobustFitResult res;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd coef = solver.solve(z);
    Eigen::VectorXd mu = K * coef;
    const double half_gamma = 0.5 * params.huber_gamma;

    for (int it = 1; it <= params.max_iter; ++it) {
        res.iterations = it;
        for (int i = 0; i < n; ++i) a[i] = soft(z[i] - mu[i], half_gamma);
        coef = solver.solve(z - a);
        Eigen::VectorXd mu_new = K * coef;
        const double change = (mu_new - mu).lpNorm<Eigen::Infinity>();
        mu = std::move(mu_new);
        if (change < params.tol_mu) {
            res.converged = true;
            break;
        }
    }
    res.mu = std::move(mu);
    res.outlier = std::move(a);
    res.coef = std::move(coef);
    return res;
}

double robust_objective(const Eigen::MatrixXd& K, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& coef, const Eigen::VectorXd& a,
                        double lambda_s, double gamma) {
    const Eigen::VectorXd mu = K * coef;
    const double fit = (z - a - mu).squaredNorm();
    const double hilbert = coef.dot(K * coef);
    return fit + gamma * a.lpNorm<1>() + lambda_s * hilbert;
}

double estimate_noise(const std::vector<double>& residuals) {
    if (residuals.empty())
        throw std::invalid_argument("estimate_noise: empty residual vector");
    std::vector<double> abs_e(residuals.size());
    for (size_t i = 0; i < residuals.size(); ++i) abs_e[i] = std::abs(residuals[i]);
    const size_t mid = abs_e.size() / 2;
    std::nth_element(abs_e.begin(), abs_e.begin() + mid, abs_e.end());
    double med = abs_e[mid];
    if (abs_e.size() % 2 == 0) {
        std::nth_element(abs_e.begin(), abs_e.begin() + (mid - 1), abs_e.end());
        med = 0.5 * (med + abs_e[mid - 1]);
    }
    return med / 0.6745;
}

double anomaly_probability(double residual, double s_hat) {
    if (s_hat < 0) throw std::invalid_argument("anomaly_probability: s_hat < 0");
    if (s_hat == 0.0) return residual == 0.0 ? 0.0 : 1.0;
    return 2.0 * normal_cdf(std::abs(residual) / s_hat) - 1.0;
}

double select_huber_gamma(double s_hat, double alpha0) {
    if (!(alpha0 > 0.0 && alpha0 < 1.0))
        throw std::domain_error("select_huber_gamma: alpha0 must lie in (0,1)");
    if (!(s_hat > 0))
        throw std::invalid_argument("select_huber_gamma: s_hat must be > 0");
    return 2.0 * s_hat * normal_quantile(1.0 - alpha0 / 2.0);
}

}  // namespace akmmd
