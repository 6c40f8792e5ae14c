// Command-line driver: run | replicate | sensitivity | phantom | validate.
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstring>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "akmmd/config.hpp"
#include "akmmd/experiment.hpp"
#include "akmmd/sampler.hpp"
#include "akmmd/simgen.hpp"

namespace {

void usage() {
    std::cout <<
        "usage: akmmd <command> [--config FILE] [--key value ...]\n"
        "\n"
        "commands:\n"
        "  run          one adaptive sampling run; writes iteration CSV, point\n"
        "               CSV, final anomaly PGM and snapshots to out_dir\n"
        "  replicate    n_replications seeded runs; writes summary CSV with\n"
        "               mean and s.d. per metric per checkpoint\n"
        "  sensitivity  (h, lambda, u) cross table on the single-disk phantom\n"
        "  phantom      emit phantom fields (PGM + CSV) only\n"
        "  validate     advisory check of the sampler parameters\n"
        "\n"
        "Config is line-oriented `key = value` with `#` comments; every key can\n"
        "be overridden by a same-named flag, e.g. --sampler random --n_max 250.\n"
        "The AKMMD_OUT_DIR environment variable overrides out_dir.\n";
}

akmmd::ExperimentConfig parse_args(int argc, char** argv) {
    akmmd::Config cfg;
    std::vector<std::string> flags;
    for (int i = 2; i < argc; ++i) flags.emplace_back(argv[i]);
    // --config is consumed first so flags override file entries.
    for (size_t i = 0; i + 1 < flags.size(); ++i) {
        if (flags[i] == "--config") {
            cfg.load_file(flags[i + 1]);
            flags.erase(flags.begin() + i, flags.begin() + i + 2);
            break;
        }
    }
    cfg.apply_flags(flags);
    return akmmd::ExperimentConfig::from_config(cfg);
}

int cmd_run(const akmmd::ExperimentConfig& cfg) {
    akmmd::RunOutputOptions io;
    io.dir = cfg.out_dir;
    io.snapshot_every = cfg.snapshot_every;
    const auto res = akmmd::run_single(cfg, cfg.seed, &io);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    const auto& last = res.records.back();
    std::cout << "n=" << last.n_points << " precision=" << last.precision
              << " recall=" << last.recall << " f=" << last.f_measure
              << " er=" << last.er << " ammd=" << last.ammd << " mmd=" << last.mmd
              << "\noutputs in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_replicate(const akmmd::ExperimentConfig& cfg) {
    const auto s = akmmd::run_replicated(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/summary_" + cfg.sampler + ".csv";
    akmmd::write_summary_csv(path, s);
    for (const auto& c : s.cells)
        std::cout << "checkpoint " << c.checkpoint << " (" << c.n << " reps): "
                  << "P=" << c.mean[0] << " R=" << c.mean[1] << " F=" << c.mean[2]
                  << " ER=" << c.mean[3] << " AMMD=" << c.mean[4]
                  << " MMD=" << c.mean[5] << "\n";
    if (s.excluded > 0)
        std::cerr << "warning: " << s.excluded << " replication(s) excluded\n";
    std::cout << "summary written to " << path << "\n";
    return 0;
}

int cmd_sensitivity(const akmmd::ExperimentConfig& cfg) {
    const auto cells = akmmd::run_sensitivity(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/sensitivity.csv";
    akmmd::write_sensitivity_csv(path, cells);
    for (const auto& c : cells)
        std::cout << "h=" << c.h << " lambda=" << c.lambda << " u=" << c.u
                  << " mmd=" << c.mmd << " ammd=" << c.ammd
                  << (c.trap_flagged ? "  [trap]" : "") << "\n";
    std::cout << "table written to " << path << "\n";
    return 0;
}

int cmd_phantom(const akmmd::ExperimentConfig& cfg) {
    akmmd::Phantom ph;
    if (cfg.phantom_kind == "disk")
        ph = akmmd::generate_disk_phantom(cfg.m, cfg.disk_radius, cfg.delta,
                                          cfg.sigma, cfg.seed);
    else {
        akmmd::PhantomParams p;
        p.m = cfg.m;
        p.n_clusters = cfg.n_clusters;
        p.delta = cfg.delta;
        p.sigma = cfg.sigma;
        p.seed = cfg.seed;
        p.eps_frac = cfg.eps_frac;
        ph = akmmd::generate_phantom(p);
    }
    std::filesystem::create_directories(cfg.out_dir);
    akmmd::write_pgm16(cfg.out_dir + "/phantom_y.pgm", ph.Y, ph.grid);
    akmmd::write_pgm16(cfg.out_dir + "/phantom_mean.pgm", ph.M, ph.grid);
    akmmd::write_pgm16(cfg.out_dir + "/phantom_anomaly.pgm", ph.A, ph.grid);
    akmmd::Field truth(ph.grid.cells());
    for (int k = 0; k < ph.grid.cells(); ++k) truth[k] = ph.true_region[k];
    akmmd::write_pgm16(cfg.out_dir + "/phantom_truth.pgm", truth, ph.grid);
    double area = 0;
    for (auto v : ph.true_region) area += v;
    area /= ph.grid.cells();
    std::cout << "phantom m=" << cfg.m << " seed=" << cfg.seed
              << " true-region area fraction=" << area << "\nfields in "
              << cfg.out_dir << "\n";
    return 0;
}

int cmd_validate(const akmmd::ExperimentConfig& cfg) {
    const auto warnings = akmmd::validate_params(cfg.sp);
    if (warnings.empty()) {
        std::cout << "ok: h=" << cfg.sp.h << " lambda=" << cfg.sp.lambda
                  << " u=" << cfg.sp.u << "\n";
    } else {
        for (const auto& w : warnings) std::cout << w.code << ": " << w.message << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || std::strcmp(argv[1], "--help") == 0 ||
        std::strcmp(argv[1], "-h") == 0) {
        usage();
        return argc < 2 ? 1 : 0;
    }
    const std::string cmd = argv[1];
    akmmd::ExperimentConfig cfg;
    try {
        cfg = parse_args(argc, argv);
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    try {
        if (cmd == "run") return cmd_run(cfg);
        if (cmd == "replicate") return cmd_replicate(cfg);
        if (cmd == "sensitivity") return cmd_sensitivity(cfg);
        if (cmd == "phantom") return cmd_phantom(cfg);
        if (cmd == "validate") return cmd_validate(cfg);
        std::cerr << "config error: unknown command '" << cmd << "'\n";
        usage();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}
