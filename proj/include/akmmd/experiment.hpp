#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "akmmd/config.hpp"
#include "akmmd/grid.hpp"
#include "akmmd/metrics.hpp"
#include "akmmd/sampler.hpp"
#include "akmmd/simgen.hpp"

namespace akmmd {

struct ExperimentConfig {
    // phantom
    std::string phantom_kind = "bspline";  // bspline | disk
    int m = 200;
    int n_clusters = 7;
    double delta = 0.3;
    double sigma = 0.05;
    double eps_frac = 0.28;
    double disk_radius = 0.0517;

    // sampler
    std::string sampler = "akm2d";  // akm2d | random | grid | doe | variance
    SamplerParams sp;

    // estimation
    double h_mu = 0.4;
    double lambda_s_coeff = 0.01;   // lambda_s = coeff * n
    double alpha0 = 0.05;           // Huber false-positive rate
    double tol_mu_coeff = 1e-3;     // tol_mu = coeff * s_hat
    double freeze_tol_coeff = 1e-3; // mean-update freeze threshold
    int fit_max_iter = 200;
    bool pa_outlier_gate = true;    // feed p_a only for Huber outliers
    double pa_refresh_tol = 0.01;   // min |delta p_a| worth a psi update

    // anomaly
    double alpha = 0.2;             // sparse-fit false-positive rate
    double h_a0 = 0.05;             // initial anomaly bandwidth
    double c_h = 0.2;
    double h_a_min_cells = 2.0;     // bandwidth floor, in grid cells
    double apg_tol = 1e-9;
    int apg_max_iter = 2000;
    bool region_two_sided = false;

    // variance benchmark
    double h_gp = 0.1;
    double gp_nugget = 1e-4;

    // run control
    int n_max = 400;
    int n_replications = 100;
    uint64_t seed = 1;
    std::string out_dir = "out";
    int snapshot_every = 50;
    std::vector<int> checkpoints = {250, 400};
    int threads = 0;  // 0 = hardware concurrency

    // sensitivity grid
    std::vector<double> h_list = {0.015, 0.02, 0.03};
    std::vector<double> lambda_list = {5, 6.7, 10, 20};
    std::vector<double> u_list = {1e-13, 1e-11, 1e-9, 1e-7};

    static ExperimentConfig from_config(const Config& cfg);
    void validate() const;
};

struct RunOutputOptions {
    std::string dir;
    int snapshot_every = 0;  // 0 disables snapshots
    bool final_fields = true;
};

struct RunResult {
    std::vector<MetricsRecord> records;  // one row per sampled point
    std::vector<int> sample_cells;
    std::vector<double> z;
    std::vector<double> p_a;
    BinaryMap final_region;
    Field final_ahat;
    std::vector<std::string> warnings;
};

/// One full adaptive-sampling run on a phantom derived from `seed`.
RunResult run_single(const ExperimentConfig& cfg, uint64_t seed,
                     const RunOutputOptions* io = nullptr);

struct ReplicationSummary {
    struct Cell {
        int checkpoint = 0;
        double mean[6] = {0, 0, 0, 0, 0, 0};  // precision, recall, f, er, ammd, mmd
        double sd[6] = {0, 0, 0, 0, 0, 0};
        int n = 0;
    };
    std::vector<Cell> cells;
    int excluded = 0;
    /// Per-replication metric rows (checkpoint-major) for downstream tests.
    std::vector<std::vector<MetricsRecord>> per_rep;
};

/// n_replications runs with seeds base_seed + r, aggregated at the
/// checkpoints. Failed replications are excluded and counted.
ReplicationSummary run_replicated(const ExperimentConfig& cfg);

struct SensitivityCell {
    double h = 0, lambda = 0, u = 0;
    double mmd = 0, ammd = 0;
    bool trap_flagged = false;
};

/// Cross table over (h, lambda, u) on the single-disk phantom.
std::vector<SensitivityCell> run_sensitivity(const ExperimentConfig& cfg);

void write_iteration_csv(const std::string& path, const RunResult& result);
void write_points_csv(const std::string& path, const RunResult& result,
                      const GridSpec& grid);
void write_summary_csv(const std::string& path, const ReplicationSummary& s);
void write_sensitivity_csv(const std::string& path,
                           const std::vector<SensitivityCell>& cells);

}  // namespace akmmd
