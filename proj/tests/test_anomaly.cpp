#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "akmmd/anomaly.hpp"
#include "akmmd/math_util.hpp"
#include "akmmd/rng.hpp"
#include "oracles.hpp"

using namespace akmmd;

namespace {
double soft_ref(double x, double t) {
    return x > t ? x - t : (x < -t ? x + t : 0.0);
}
}  // namespace

TEST_CASE("soft-threshold identity via the identity-kernel closed form") {
    const int n = 12;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd e(n);
    Rng rng(3);
    for (int i = 0; i < n; ++i) e[i] = 2.0 * rng.normal();
    for (double g : {0.1, 0.7, 2.0, 5.0}) {
        const auto res = apg_fit(e, I, g, 1e-14, 20000);
        for (int i = 0; i < n; ++i)
            CHECK(res.theta[i] == doctest::Approx(soft_ref(e[i], g / 2)).epsilon(1e-10));
    }
}

TEST_CASE("apg trivial solutions") {
    Rng rng(10);
    const int n = 20;
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {rng.u01(), rng.u01()};
    const Eigen::MatrixXd K = kernel_matrix(pts, 0.05);

    const auto zero = apg_fit(Eigen::VectorXd::Zero(n), K, 0.3);
    CHECK(zero.theta.lpNorm<Eigen::Infinity>() == 0.0);

    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e[i] = rng.normal();
    const double null_gamma = 2.0 * (K.transpose() * e).cwiseAbs().maxCoeff();
    const auto res = apg_fit(e, K, null_gamma * 1.01);
    CHECK(res.theta.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("apg objective matches a long-run proximal-gradient reference") {
    Rng rng(17);
    for (int inst = 0; inst < 6; ++inst) {
        const int n = 10 + (int)rng.below(41);
        std::vector<Point> pts(n);
        for (auto& p : pts) p = {rng.u01(), rng.u01()};
        const double h = 0.02 + 0.05 * rng.u01();
        const Eigen::MatrixXd K = kernel_matrix(pts, h);
        Eigen::VectorXd e(n);
        for (int i = 0; i < n; ++i) e[i] = 0.1 * rng.normal();
        e[(int)rng.below(n)] += 1.0;
        const double l = std::sqrt(
            [&] {
                double m = 0;
                for (int i = 0; i < n; ++i) m = std::max(m, K.col(i).squaredNorm());
                return m;
            }());
        const double gamma = 0.3 * l;

        const auto mine = apg_fit(e, K, gamma, 1e-12, 200000);
        const auto ref = oracle::ista_reference(e, K, gamma, 1e-12, 1000000);
        const double f_mine = oracle::l1_objective(e, K, mine.theta, gamma);
        const double f_ref = oracle::l1_objective(e, K, ref, gamma);
        CHECK(f_mine <= f_ref * (1 + 1e-6) + 1e-12);
        CHECK(std::abs(f_mine - f_ref) / (std::abs(f_ref) + 1e-300) < 1e-6);
    }
}

TEST_CASE("select_sparse_gamma closed form") {
    const int n = 9;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    CHECK(select_sparse_gamma(I, 1.0, 0.05, GammaMode::closed_form) ==
          doctest::Approx(2 * 1.959964).epsilon(1e-5));
    const double g = select_sparse_gamma(I, 0.3, 0.05, GammaMode::closed_form);
    CHECK(select_sparse_gamma(I, 0.9, 0.05, GammaMode::closed_form) ==
          doctest::Approx(3.0 * g).epsilon(1e-12));
    CHECK_THROWS_AS(select_sparse_gamma(I, 1.0, 0.0, GammaMode::closed_form),
                    std::domain_error);
}

TEST_CASE("monte carlo gamma agrees with closed form for near-orthogonal K") {
    // well-separated points, small bandwidth: kernels barely overlap
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            pts.push_back({0.05 + i * 0.1, 0.05 + j * 0.1});
    const double h_a = 0.012;
    const Eigen::MatrixXd K = kernel_matrix(pts, h_a);
    const double s = 0.05;
    const double g_cf = select_sparse_gamma(K, s, 0.05, GammaMode::closed_form);
    MonteCarloGammaOpts opts;
    opts.replications = 100;
    opts.seed = 5;
    const double g_mc = select_sparse_gamma(K, s, 0.05, GammaMode::monte_carlo, opts);
    CHECK(std::abs(g_mc - g_cf) / g_cf < 0.20);
}

TEST_CASE("sparse-fit false-positive rate calibrates under pure noise") {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            pts.push_back({0.05 + i * 0.1, 0.05 + j * 0.1});
    const double h_a = 0.012, s = 0.05, alpha = 0.05;
    const Eigen::MatrixXd K = kernel_matrix(pts, h_a);
    MonteCarloGammaOpts opts;
    opts.replications = 100;
    opts.seed = 9;
    const double gamma = select_sparse_gamma(K, s, alpha, GammaMode::monte_carlo, opts);

    // fresh noise, 200 replications
    Rng rng(31337);
    const double w = 0.005 * s;
    double frac = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Eigen::VectorXd e(100);
        for (int i = 0; i < 100; ++i) e[i] = s * rng.normal();
        const auto res = apg_fit(e, K, gamma, 1e-10, 5000);
        const Eigen::VectorXd ahat = K * res.theta;
        int cnt = 0;
        for (int i = 0; i < 100; ++i) cnt += std::abs(ahat[i]) > w;
        frac += double(cnt) / 100;
    }
    frac /= reps;
    CHECK(std::abs(frac - alpha) <= 0.1 * alpha);
}

TEST_CASE("render_anomaly geometry") {
    GridSpec g(60);
    std::vector<Point> centers = {{0.3, 0.3}, {0.8, 0.75}};
    Field ahat;
    BinaryMap region;

    Eigen::VectorXd none = Eigen::VectorXd::Zero(2);
    render_anomaly(none, centers, 0.03, g, 0.05, ahat, region);
    for (auto v : region) CHECK(v == 0);

    Eigen::VectorXd one(2);
    one << 3e-4, 0.0;
    render_anomaly(one, centers, 0.03, g, 0.05, ahat, region);
    CHECK(connected_components_4(region, g) == 1);

    Eigen::VectorXd two(2);
    two << 3e-4, 2e-4;
    render_anomaly(two, centers, 0.03, g, 0.05, ahat, region);
    CHECK(connected_components_4(region, g) == 2);
}

TEST_CASE("truncated rendering equals the naive full evaluation") {
    GridSpec g(40);
    Rng rng(2);
    std::vector<Point> centers;
    Eigen::VectorXd theta(5);
    for (int k = 0; k < 5; ++k) {
        centers.push_back({rng.u01(), rng.u01()});
        theta[k] = 1e-4 * (rng.u01() - 0.3);
    }
    const double h_a = 0.02, s = 0.05;
    Field ahat;
    BinaryMap region;
    render_anomaly(theta, centers, h_a, g, s, ahat, region);
    for (int q = 0; q < g.cells(); ++q) {
        double full = 0;
        for (int k = 0; k < 5; ++k) {
            const double dx = g.x_of(q) - centers[k][0];
            const double dy = g.y_of(q) - centers[k][1];
            full += theta[k] * gaussian_kernel_2d_d2(dx * dx + dy * dy, h_a);
        }
        CHECK(ahat[q] == doctest::Approx(full).epsilon(1e-12));
        CHECK(region[q] == (ahat[q] > 0.005 * s ? 1 : 0));
    }
}

TEST_CASE("region scale invariance under joint rescaling") {
    GridSpec g(50);
    Rng rng(8);
    std::vector<Point> pts;
    for (int i = 0; i < 64; ++i) pts.push_back({rng.u01(), rng.u01()});
    Eigen::VectorXd e(64);
    for (int i = 0; i < 64; ++i) e[i] = 0.05 * rng.normal();
    e[10] += 0.3;
    e[30] += 0.25;
    const double h_a = 0.02;
    const Eigen::MatrixXd K = kernel_matrix(pts, h_a);

    auto fit_region = [&](double scale) {
        const double s = 0.05 * scale;
        Eigen::VectorXd es = e * scale;
        const double gamma = select_sparse_gamma(K, s, 0.1, GammaMode::closed_form);
        const auto res = apg_fit(es, K, gamma, 1e-12 * scale, 50000);
        Field ahat;
        BinaryMap region;
        render_anomaly(res.theta, pts, h_a, g, s, ahat, region);
        return region;
    };
    const auto r1 = fit_region(1.0);
    const auto r2 = fit_region(7.5);
    CHECK(r1 == r2);
}

TEST_CASE("update_anomaly_bandwidth") {
    GridSpec g(5);
    BinaryMap empty(g.cells(), 0);
    std::vector<Point> pts = {{0.2, 0.2}, {0.8, 0.8}};
    CHECK(update_anomaly_bandwidth(empty, pts, 0.2, 0.07, g) == 0.07);

    // hand-built 5x5 region, exhaustive-scan oracle
    BinaryMap region(g.cells(), 0);
    for (int k : {0, 1, 5, 12, 24}) region[k] = 1;
    double max_min = 0;
    for (int k : {0, 1, 5, 12, 24}) {
        double best = 1e300;
        for (const auto& p : pts) {
            const double dx = g.x_of(k) - p[0], dy = g.y_of(k) - p[1];
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
        max_min = std::max(max_min, best);
    }
    CHECK(update_anomaly_bandwidth(region, pts, 0.2, 0.07, g) ==
          doctest::Approx(0.2 * max_min).epsilon(1e-12));

    // densifying the samples never increases h_a
    double prev = update_anomaly_bandwidth(region, pts, 0.2, 0.07, g);
    Rng rng(4);
    for (int t = 0; t < 12; ++t) {
        pts.push_back({rng.u01(), rng.u01()});
        const double h = update_anomaly_bandwidth(region, pts, 0.2, 0.07, g);
        CHECK(h <= prev + 1e-15);
        prev = h;
    }
}
