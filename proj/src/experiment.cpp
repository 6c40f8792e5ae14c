#include "akmmd/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "akmmd/anomaly.hpp"
#include "akmmd/benchmarks.hpp"
#include "akmmd/estimation.hpp"
#include "akmmd/math_util.hpp"
#include "akmmd/rng.hpp"

namespace akmmd {

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_list(s)) out.push_back((int)v);
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig e;
    e.phantom_kind = cfg.get_str("phantom", e.phantom_kind);
    e.m = cfg.get_int("m", e.m);
    e.n_clusters = cfg.get_int("n_clusters", e.n_clusters);
    e.delta = cfg.get_double("delta", e.delta);
    e.sigma = cfg.get_double("sigma", e.sigma);
    e.eps_frac = cfg.get_double("eps_frac", e.eps_frac);
    e.disk_radius = cfg.get_double("disk_radius", e.disk_radius);

    e.sampler = cfg.get_str("sampler", e.sampler);
    e.sp.h = cfg.get_double("h", e.sp.h);
    e.sp.lambda = cfg.get_double("lambda", e.sp.lambda);
    e.sp.u = cfg.get_double("u", e.sp.u);
    e.sp.n_init = cfg.get_int("n_init", e.sp.n_init);

    e.h_mu = cfg.get_double("h_mu", e.h_mu);
    e.lambda_s_coeff = cfg.get_double("lambda_s_coeff", e.lambda_s_coeff);
    e.alpha0 = cfg.get_double("alpha0", e.alpha0);
    e.tol_mu_coeff = cfg.get_double("tol_mu_coeff", e.tol_mu_coeff);
    e.freeze_tol_coeff = cfg.get_double("freeze_tol_coeff", e.freeze_tol_coeff);
    e.fit_max_iter = cfg.get_int("fit_max_iter", e.fit_max_iter);
    e.pa_outlier_gate = cfg.get_bool("pa_outlier_gate", e.pa_outlier_gate);
    e.pa_refresh_tol = cfg.get_double("pa_refresh_tol", e.pa_refresh_tol);

    e.alpha = cfg.get_double("alpha", e.alpha);
    e.h_a0 = cfg.get_double("h_a0", e.h_a0);
    e.c_h = cfg.get_double("c_h", e.c_h);
    e.h_a_min_cells = cfg.get_double("h_a_min_cells", e.h_a_min_cells);
    e.apg_tol = cfg.get_double("apg_tol", e.apg_tol);
    e.apg_max_iter = cfg.get_int("apg_max_iter", e.apg_max_iter);
    e.region_two_sided = cfg.get_bool("region_two_sided", e.region_two_sided);

    e.h_gp = cfg.get_double("h_gp", e.h_gp);
    e.gp_nugget = cfg.get_double("gp_nugget", e.gp_nugget);

    e.n_max = cfg.get_int("n_max", e.n_max);
    e.n_replications = cfg.get_int("n_replications", e.n_replications);
    e.seed = (uint64_t)cfg.get_ll("seed", (long long)e.seed);
    e.out_dir = cfg.get_str("out_dir", e.out_dir);
    if (const char* env = std::getenv("AKMMD_OUT_DIR")) e.out_dir = env;
    e.snapshot_every = cfg.get_int("snapshot_every", e.snapshot_every);
    if (cfg.has("checkpoints"))
        e.checkpoints = parse_int_list(cfg.get_str("checkpoints", ""));
    e.threads = cfg.get_int("threads", e.threads);

    if (cfg.has("h_list")) e.h_list = parse_list(cfg.get_str("h_list", ""));
    if (cfg.has("lambda_list"))
        e.lambda_list = parse_list(cfg.get_str("lambda_list", ""));
    if (cfg.has("u_list")) e.u_list = parse_list(cfg.get_str("u_list", ""));
    return e;
}

void ExperimentConfig::validate() const {
    sp.validate_basic();
    if (m < 2) throw std::invalid_argument("config: m must be >= 2");
    if (sp.n_init > n_max)
        throw std::invalid_argument("config: n_init must be <= n_max");
    if (n_max > m * m) throw std::invalid_argument("config: n_max exceeds m^2");
    if (n_replications < 1)
        throw std::invalid_argument("config: n_replications must be >= 1");
    if (!(alpha0 > 0 && alpha0 < 1) || !(alpha > 0 && alpha < 1))
        throw std::invalid_argument("config: alpha0 and alpha must lie in (0,1)");
    if (sampler != "akm2d" && sampler != "random" && sampler != "grid" &&
        sampler != "doe" && sampler != "variance")
        throw std::invalid_argument("config: unknown sampler '" + sampler + "'");
    if (phantom_kind != "bspline" && phantom_kind != "disk")
        throw std::invalid_argument("config: unknown phantom '" + phantom_kind + "'");
}

namespace {

Phantom make_phantom(const ExperimentConfig& cfg, uint64_t seed) {
    if (cfg.phantom_kind == "disk")
        return generate_disk_phantom(cfg.m, cfg.disk_radius, cfg.delta, cfg.sigma,
                                     seed);
    PhantomParams p;
    p.m = cfg.m;
    p.n_clusters = cfg.n_clusters;
    p.delta = cfg.delta;
    p.sigma = cfg.sigma;
    p.seed = seed;
    p.eps_frac = cfg.eps_frac;
    return generate_phantom(p);
}

std::unique_ptr<PointSelector> make_selector(const ExperimentConfig& cfg,
                                             const GridSpec& grid,
                                             uint64_t seed) {
    if (cfg.sampler == "akm2d")
        return std::make_unique<AkmSelector>(grid, cfg.sp);
    if (cfg.sampler == "random")
        return std::make_unique<RandomSampler>(grid, mix_seed(seed, 0x72616e64));
    if (cfg.sampler == "grid")
        return std::make_unique<GridSampler>(grid, mix_seed(seed, 0x67726964));
    if (cfg.sampler == "doe") return std::make_unique<DoeSampler>(grid);
    return std::make_unique<VarianceSampler>(grid, cfg.h_gp, cfg.gp_nugget);
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, uint64_t seed,
                     const RunOutputOptions* io) {
    cfg.validate();
    RunResult out;
    const Phantom ph = make_phantom(cfg, seed);
    const GridSpec grid = ph.grid;
    auto selector = make_selector(cfg, grid, seed);

    for (const auto& w : validate_params(cfg.sp))
        if (cfg.sampler == "akm2d")
            out.warnings.push_back(w.code + ": " + w.message);

    const std::vector<int> init = init_maximin(grid, cfg.sp.n_init);
    MetricsTracker tracker(grid, ph.true_region);

    std::vector<Point> pts;
    std::vector<double> z, mu_hat, resid, pa_full, pa_fed, pa_applied;
    Eigen::VectorXd fit_coef;
    double fit_offset = 0.0;
    int fit_n = 0;  // points covered by the last representer fit
    double s_hat = 0.0, gamma = 0.0;
    bool have_gamma = false;
    bool frozen = false;
    int stable_count = 0;

    double h_a = cfg.h_a0;
    double gamma_a = 0.0;
    Field a_hat;
    BinaryMap region(grid.cells(), 0);
    Eigen::VectorXd theta;

    if (io) std::filesystem::create_directories(io->dir);

    for (int n = 1; n <= cfg.n_max; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        int warn = 0;

        int cell;
        if (n <= cfg.sp.n_init)
            cell = init[n - 1];
        else
            cell = selector->next();

        pts.push_back({grid.x_of(cell), grid.y_of(cell)});
        z.push_back(ph.Y[cell]);
        out.sample_cells.push_back(cell);
        tracker.add_point(cell);
        const int nn = (int)pts.size();

        // ---- robust mean fit (with the freeze rule) ----
        if (nn >= 2) {
            bool refit = true;
            if (frozen && fit_n >= 2) {
                // Predict the new point from the frozen representer fit.
                double mu_new = fit_offset;
                for (int k = 0; k < fit_n; ++k) {
                    const double dx = pts.back()[0] - pts[k][0];
                    const double dy = pts.back()[1] - pts[k][1];
                    mu_new += fit_coef[k] *
                              gaussian_kernel_2d_d2(dx * dx + dy * dy, cfg.h_mu);
                }
                const double e_new = z.back() - mu_new;
                if (std::abs(e_new) <= 3.0 * gamma) {
                    refit = false;
                    mu_hat.push_back(mu_new);
                } else {
                    frozen = false;  // a gross residual re-enables fitting
                    stable_count = 0;
                }
            }
            if (refit) {
                RobustFitParams rp;
                rp.h_mu = cfg.h_mu;
                rp.lambda_s = cfg.lambda_s_coeff * nn;
                rp.huber_gamma = have_gamma ? gamma : 1e18;
                double scale = s_hat;
                if (scale <= 0) {
                    double mean = 0, var = 0;
                    for (double v : z) mean += v;
                    mean /= nn;
                    for (double v : z) var += (v - mean) * (v - mean);
                    scale = std::sqrt(var / nn) + 1e-12;
                }
                rp.tol_mu = cfg.tol_mu_coeff * scale;
                rp.max_iter = cfg.fit_max_iter;

                // Center the measurements so the Hilbert penalty shrinks toward
                // the sample mean rather than zero.
                double offset = 0;
                for (double v : z) offset += v;
                offset /= nn;
                Eigen::VectorXd zc(nn);
                for (int k = 0; k < nn; ++k) zc[k] = z[k] - offset;

                const auto fit = robust_fit(pts, zc, rp);
                if (!fit.converged) warn |= 1;

                const std::vector<double> mu_prev = mu_hat;
                mu_hat.resize(nn);
                for (int k = 0; k < nn; ++k) mu_hat[k] = fit.mu[k] + offset;
                fit_coef = fit.coef;
                fit_offset = offset;
                fit_n = nn;

                if (!mu_prev.empty()) {
                    double change = 0;
                    for (size_t k = 0; k < mu_prev.size(); ++k)
                        change = std::max(change, std::abs(mu_hat[k] - mu_prev[k]));
                    if (s_hat > 0 && change < cfg.freeze_tol_coeff * s_hat)
                        ++stable_count;
                    else
                        stable_count = 0;
                    frozen = stable_count >= 2;
                }
            }

            resid.resize(nn);
            for (int k = 0; k < nn; ++k) resid[k] = z[k] - mu_hat[k];
            s_hat = estimate_noise(resid);
            if (s_hat > 0) {
                gamma = select_huber_gamma(s_hat, cfg.alpha0);
                have_gamma = true;
            }
            pa_full.resize(nn);
            pa_fed.resize(nn);
            for (int k = 0; k < nn; ++k) {
                pa_full[k] = s_hat > 0 ? anomaly_probability(resid[k], s_hat)
                                       : (resid[k] == 0 ? 0.0 : 1.0);
                const bool outlier = have_gamma && std::abs(resid[k]) > 0.5 * gamma;
                pa_fed[k] = (!cfg.pa_outlier_gate || outlier) ? pa_full[k] : 0.0;
            }
        } else {
            mu_hat.push_back(z.back());
            resid.assign(1, 0.0);
            pa_full.assign(1, 0.0);
            pa_fed.assign(1, 0.0);
        }

        // ---- feed the sampler ----
        selector->ingest(cell, pa_fed[nn - 1]);
        pa_applied.push_back(pa_fed[nn - 1]);
        for (int k = 0; k < nn; ++k) {
            if (std::abs(pa_fed[k] - pa_applied[k]) > cfg.pa_refresh_tol) {
                selector->refresh_probability(out.sample_cells[k], pa_fed[k]);
                pa_applied[k] = pa_fed[k];
            }
        }

        // ---- sparse anomaly fit ----
        if (nn >= 2 && s_hat > 0) {
            const double floor_h = cfg.h_a_min_cells / grid.m;
            h_a = std::max(update_anomaly_bandwidth(region, pts, cfg.c_h, h_a, grid),
                           floor_h);
            const Eigen::MatrixXd Ka = kernel_matrix(pts, h_a);
            gamma_a = select_sparse_gamma(Ka, s_hat, cfg.alpha,
                                          GammaMode::closed_form);
            Eigen::VectorXd e(nn);
            for (int k = 0; k < nn; ++k) e[k] = resid[k];
            const auto apg = apg_fit(e, Ka, gamma_a, cfg.apg_tol, cfg.apg_max_iter);
            if (!apg.converged) warn |= 2;
            theta = apg.theta;
            render_anomaly(theta, pts, h_a, grid, s_hat, a_hat, region,
                           cfg.region_two_sided);
        }

        // ---- metrics ----
        MetricsRecord rec;
        rec.n_points = nn;
        const auto det = detection_metrics(region, ph.true_region, grid);
        rec.precision = det.precision;
        rec.recall = det.recall;
        rec.f_measure = det.f_measure;
        const auto samp = tracker.scores();
        rec.er = samp.er;
        rec.ammd = samp.ammd;
        rec.mmd = samp.mmd;
        rec.s_hat = s_hat;
        rec.gamma_a = gamma_a;
        rec.h_a = h_a;
        rec.warn = warn;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        out.records.push_back(rec);

        if (io && io->snapshot_every > 0 && n % io->snapshot_every == 0 &&
            !a_hat.empty()) {
            std::ostringstream name;
            name << io->dir << "/ahat_" << std::setw(6) << std::setfill('0') << n
                 << ".pgm";
            write_pgm16(name.str(), a_hat, grid);
        }
    }

    out.z = z;
    out.p_a = pa_full;
    out.final_region = region;
    out.final_ahat = a_hat.empty() ? Field(grid.cells(), 0.0) : a_hat;

    if (io && io->final_fields) {
        Field region_f(grid.cells());
        for (int k = 0; k < grid.cells(); ++k) region_f[k] = out.final_region[k];
        write_pgm16(io->dir + "/region_final.pgm", region_f, grid);
        write_pgm16(io->dir + "/ahat_final.pgm", out.final_ahat, grid);
        write_iteration_csv(io->dir + "/iterations.csv", out);
        write_points_csv(io->dir + "/points.csv", out, grid);
    }
    return out;
}

ReplicationSummary run_replicated(const ExperimentConfig& cfg) {
    cfg.validate();
    ReplicationSummary summary;
    const int R = cfg.n_replications;
    std::vector<std::vector<MetricsRecord>> per_rep(R);
    std::vector<uint8_t> failed(R, 0);

    int threads = cfg.threads > 0 ? cfg.threads
                                  : (int)std::thread::hardware_concurrency();
    if (threads < 1) threads = 1;
    threads = std::min(threads, R);

    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t]() {
            for (int r = t; r < R; r += threads) {
                try {
                    const RunResult res = run_single(cfg, cfg.seed + r, nullptr);
                    std::vector<MetricsRecord> rows;
                    for (int cp : cfg.checkpoints)
                        if (cp >= 1 && cp <= (int)res.records.size())
                            rows.push_back(res.records[cp - 1]);
                    per_rep[r] = std::move(rows);
                } catch (const std::exception&) {
                    failed[r] = 1;
                }
            }
        });
    }
    for (auto& w : workers) w.join();

    for (int r = 0; r < R; ++r)
        if (failed[r]) ++summary.excluded;

    for (size_t ci = 0; ci < cfg.checkpoints.size(); ++ci) {
        ReplicationSummary::Cell cell;
        cell.checkpoint = cfg.checkpoints[ci];
        std::vector<std::array<double, 6>> vals;
        for (int r = 0; r < R; ++r) {
            if (failed[r] || ci >= per_rep[r].size()) continue;
            const auto& m = per_rep[r][ci];
            vals.push_back({m.precision, m.recall, m.f_measure, m.er, m.ammd, m.mmd});
        }
        cell.n = (int)vals.size();
        for (int j = 0; j < 6; ++j) {
            double s = 0;
            for (auto& v : vals) s += v[j];
            cell.mean[j] = vals.empty() ? 0 : s / vals.size();
            double q = 0;
            for (auto& v : vals) q += (v[j] - cell.mean[j]) * (v[j] - cell.mean[j]);
            cell.sd[j] = vals.size() > 1 ? std::sqrt(q / (vals.size() - 1)) : 0;
        }
        summary.cells.push_back(cell);
    }
    summary.per_rep = std::move(per_rep);
    return summary;
}

std::vector<SensitivityCell> run_sensitivity(const ExperimentConfig& cfg) {
    ExperimentConfig base = cfg;
    base.phantom_kind = "disk";
    base.sampler = "akm2d";
    std::vector<SensitivityCell> out;
    for (double h : cfg.h_list)
        for (double lam : cfg.lambda_list)
            for (double u : cfg.u_list) {
                ExperimentConfig c = base;
                c.sp.h = h;
                c.sp.lambda = lam;
                c.sp.u = u;
                SensitivityCell cell;
                cell.h = h;
                cell.lambda = lam;
                cell.u = u;
                for (const auto& w : validate_params(c.sp))
                    if (w.code == "trap") cell.trap_flagged = true;
                const RunResult res = run_single(c, c.seed, nullptr);
                cell.mmd = res.records.back().mmd;
                cell.ammd = res.records.back().ammd;
                out.push_back(cell);
            }
    return out;
}

void write_iteration_csv(const std::string& path, const RunResult& result) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# akmmd iteration csv v1\n";
    f << "n,precision,recall,f,er,ammd,mmd,s_hat,gamma_a,h_a,wall_ms,warn\n";
    f << std::setprecision(12);
    for (const auto& r : result.records)
        f << r.n_points << ',' << r.precision << ',' << r.recall << ','
          << r.f_measure << ',' << r.er << ',' << r.ammd << ',' << r.mmd << ','
          << r.s_hat << ',' << r.gamma_a << ',' << r.h_a << ',' << r.wall_ms << ','
          << r.warn << '\n';
}

void write_points_csv(const std::string& path, const RunResult& result,
                      const GridSpec& grid) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# akmmd points csv v1\n";
    f << "n,i,j,x,y,z,p_a\n";
    f << std::setprecision(12);
    for (size_t k = 0; k < result.sample_cells.size(); ++k) {
        const int c = result.sample_cells[k];
        f << (k + 1) << ',' << (grid.row(c) + 1) << ',' << (grid.col(c) + 1) << ','
          << grid.x_of(c) << ',' << grid.y_of(c) << ',' << result.z[k] << ','
          << (k < result.p_a.size() ? result.p_a[k] : 0.0) << '\n';
    }
}

void write_summary_csv(const std::string& path, const ReplicationSummary& s) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# akmmd replication summary v1; excluded=" << s.excluded << "\n";
    f << "checkpoint,n_reps,precision_mean,precision_sd,recall_mean,recall_sd,"
         "f_mean,f_sd,er_mean,er_sd,ammd_mean,ammd_sd,mmd_mean,mmd_sd\n";
    f << std::setprecision(12);
    for (const auto& c : s.cells) {
        f << c.checkpoint << ',' << c.n;
        for (int j = 0; j < 6; ++j) f << ',' << c.mean[j] << ',' << c.sd[j];
        f << '\n';
    }
}

void write_sensitivity_csv(const std::string& path,
                           const std::vector<SensitivityCell>& cells) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# akmmd sensitivity csv v1\n";
    f << "h,lambda,u,mmd,ammd,trap_flagged\n";
    f << std::setprecision(12);
    for (const auto& c : cells)
        f << c.h << ',' << c.lambda << ',' << c.u << ',' << c.mmd << ',' << c.ammd
          << ',' << (c.trap_flagged ? 1 : 0) << '\n';
}

}  // namespace akmmd
