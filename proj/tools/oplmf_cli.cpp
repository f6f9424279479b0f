#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oplmf/harness.hpp"
#include "oplmf/svg.hpp"

namespace fs = std::filesystem;
using namespace oplmf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    int experiment = 0;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> iterations;
    std::string format = "csv";
    std::string msd_mode;
    bool no_stability_clamp = false;
    bool force = false;
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = load_experiment_config(opts.config_path);
    } else if (opts.experiment >= 1 && opts.experiment <= 7) {
        cfg = experiment_catalog()[opts.experiment - 1];
    } else {
        throw ConfigError("select --experiment <1..7> or --config <path>");
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.runs) cfg.runs = *opts.runs;
    if (opts.iterations) cfg.iterations = *opts.iterations;
    for (auto& alg : cfg.algorithms) {
        if (auto* c = std::get_if<OplmfConfig>(&alg.config)) {
            if (opts.msd_mode == "oracle") c->msd_mode = MsdMode::Oracle;
            if (opts.msd_mode == "model") c->msd_mode = MsdMode::Model;
            if (opts.no_stability_clamp) c->clamp_to_stability = false;
        }
    }
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const fs::path& path, bool force) {
    if (fs::exists(path) && !force) {
        throw IoError("refusing to overwrite " + path.string() +
                      " (pass --force)");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void write_svgs(const fs::path& dir, const ExperimentConfig& cfg,
                const std::map<std::string, MsdTrace>& traces, bool force) {
    const std::vector<std::pair<std::string, std::string>> palette = {
        {"NLMF", "red"}, {"VSSLMFQ", "green"}, {"OPLMF", "blue"},
        {"LMF", "orange"}};
    auto color_of = [&](const std::string& tag) {
        for (const auto& [t, c] : palette) {
            if (t == tag) return c;
        }
        return std::string("black");
    };

    std::vector<SvgSeries> msd_series, mu_series, err_series;
    for (const auto& alg : cfg.algorithms) {
        const auto it = traces.find(alg.tag());
        if (it == traces.end()) continue;
        msd_series.push_back({alg.tag(), color_of(alg.tag()),
                              it->second.msd_db_sim});
        mu_series.push_back({alg.tag(), color_of(alg.tag()), it->second.mu_mean});
        if (alg.tag() == "OPLMF") {
            msd_series.push_back({"OPLMF theory", "gray",
                                  it->second.msd_db_theory});
            err_series.push_back({"|sim - theory|", "blue",
                                  it->second.msd_error});
        }
    }
    auto emit = [&](const std::string& stem, const std::string& title,
                    const std::string& ylabel,
                    const std::vector<SvgSeries>& series) {
        auto out = open_output(dir / (cfg.name + "_" + stem + ".svg"), force);
        write_line_chart(out, title, ylabel, series);
    };
    emit("msd", cfg.name + ": MSD", "MSD [dB]", msd_series);
    if (!err_series.empty()) {
        emit("msd_error", cfg.name + ": |sim - theory|", "linear MSD error",
             err_series);
    }
    emit("mu", cfg.name + ": step-size", "mu(n)", mu_series);
}

void run_one(const ExperimentConfig& cfg, const CommonOpts& opts) {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    const auto traces = run_experiment(cfg);
    {
        auto out = open_output(dir / (cfg.name + "_trace.csv"), opts.force);
        write_trace_csv(out, cfg, traces);
    }
    const std::string summary = format_summary(cfg, traces);
    {
        auto out = open_output(dir / (cfg.name + "_summary.txt"), opts.force);
        out << summary;
    }
    if (opts.format == "csv+svg") {
        try {
            write_svgs(dir, cfg, traces, opts.force);
        } catch (const IoError& e) {
            std::cerr << "warning: SVG output skipped: " << e.what() << "\n";
        }
    }
    std::cout << summary;
}

int cmd_run(const CommonOpts& opts) {
    run_one(resolve_config(opts), opts);
    return kExitOk;
}

int cmd_compare(const CommonOpts& opts) {
    for (const auto& cfg0 : experiment_catalog()) {
        CommonOpts o = opts;
        o.experiment = cfg0.id;
        o.config_path.clear();
        run_one(resolve_config(o), o);
    }
    return kExitOk;
}

int cmd_theory(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    const std::size_t taps = cfg.system.w_base.size();
    bool clamp = true;
    for (const auto& alg : cfg.algorithms) {
        if (const auto* c = std::get_if<OplmfConfig>(&alg.config)) {
            clamp = c->clamp_to_stability;
        }
    }
    const NoiseSpec noise = cfg.effective_noise();
    const double msd0 =
        squared_deviation(cfg.system.w_base, WeightVector(taps, 0.0));
    const TheoryTrace trace =
        theory_trajectory(taps, noise.moments(), cfg.input.variance(), msd0,
                          cfg.iterations, clamp);

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    auto out = open_output(dir / (cfg.name + "_theory.csv"), opts.force);
    out << "iteration,msd_db_theory,mu\n";
    char buf[64];
    for (int n = 0; n < cfg.iterations; ++n) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", n,
                      linear_to_db(trace.msd_linear[n]), trace.mu[n]);
        out << buf;
    }
    std::cout << "theory trace written for " << cfg.name << " ("
              << cfg.iterations << " iterations)\n";
    return kExitOk;
}

struct MomentsOpts {
    std::string family = "gaussian";
    double scale = 1.0;
    bool centered = false;
    long samples = 1000000;
    std::uint64_t seed = 1;
};

int cmd_moments(const MomentsOpts& opts) {
    NoiseSpec spec;
    spec.family = noise_family_from_string(opts.family);
    spec.scale = opts.scale;
    spec.centered = opts.centered;
    spec.validate();

    const MomentSet closed = spec.moments();
    std::mt19937_64 rng(opts.seed);
    double s2 = 0, s4 = 0, s6 = 0;
    for (long i = 0; i < opts.samples; ++i) {
        const double v = sample(spec, rng);
        const double v2 = v * v;
        s2 += v2;
        s4 += v2 * v2;
        s6 += v2 * v2 * v2;
    }
    const double n = static_cast<double>(opts.samples);
    s2 /= n;
    s4 /= n;
    s6 /= n;

    auto row = [](const char* name, double cf, double mc) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-10s %16.8g %16.8g %10.3f%%\n", name,
                      cf, mc, cf != 0 ? 100.0 * (mc - cf) / cf : 0.0);
        std::cout << buf;
    };
    std::cout << "family=" << to_string(spec.family) << " scale=" << spec.scale
              << " centered=" << (spec.centered ? "yes" : "no")
              << " samples=" << opts.samples << "\n";
    char hdr[128];
    std::snprintf(hdr, sizeof(hdr), "%-10s %16s %16s %11s\n", "moment",
                  "closed-form", "monte-carlo", "rel err");
    std::cout << hdr;
    row("E[rho^2]", closed.sigma_rho_sq, s2);
    row("E[rho^4]", closed.m4, s4);
    row("E[rho^6]", closed.m6, s6);
    return kExitOk;
}

int cmd_catalog() {
    for (const auto& cfg : experiment_catalog()) {
        const NoiseSpec eff = cfg.effective_noise();
        std::cout << cfg.name << ": "
                  << (cfg.system.variant == SystemModel::Variant::TimeInvariant
                          ? "time-invariant"
                          : "random-walk")
                  << " system, "
                  << (cfg.input.kind == InputModel::Kind::Ar1 ? "AR(1)"
                                                              : "white")
                  << " input, " << to_string(cfg.noise.family)
                  << " noise (scale " << eff.scale << "), SNR " << cfg.snr_db
                  << " dB" << (cfg.apply_snr_scaling ? "" : " (nominal)")
                  << ", " << cfg.runs << " runs x " << cfg.iterations
                  << " iterations, seed " << cfg.seed << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OPLMF adaptive-filter benchmark harness"};
    app.require_subcommand(1);

    CommonOpts opts;
    MomentsOpts mopts;

    auto add_common = [&](CLI::App* sub, bool with_overrides = true) {
        sub->add_option("--experiment", opts.experiment,
                        "catalog experiment id (1..7)");
        sub->add_option("--config", opts.config_path, "experiment config file");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_flag("--force", opts.force, "overwrite existing outputs");
        if (with_overrides) {
            sub->add_option("--seed", opts.seed, "seed override");
            sub->add_option("--runs", opts.runs, "Monte Carlo run count");
            sub->add_option("--iterations", opts.iterations, "iteration count");
            sub->add_option("--format", opts.format, "csv or csv+svg")
                ->check(CLI::IsMember({"csv", "csv+svg"}));
            sub->add_option("--msd-mode", opts.msd_mode,
                            "OPLMF MSD source: oracle or model")
                ->check(CLI::IsMember({"oracle", "model"}));
            sub->add_flag("--no-stability-clamp", opts.no_stability_clamp,
                          "disable the OPLMF step-size stability clamp");
        }
    };

    auto* run = app.add_subcommand("run", "run one experiment, emit CSV traces");
    add_common(run);
    auto* compare =
        app.add_subcommand("compare", "run the full catalog and summarize");
    add_common(compare);
    auto* theory = app.add_subcommand(
        "theory", "emit the model MSD/step-size trajectories, no simulation");
    add_common(theory);

    auto* moments =
        app.add_subcommand("moments", "closed-form vs Monte Carlo noise moments");
    moments->add_option("--family", mopts.family,
                        "gaussian|uniform|binary|rayleigh|poisson");
    moments->add_option("--scale", mopts.scale, "family scale parameter");
    moments->add_flag("--centered", mopts.centered, "subtract the family mean");
    moments->add_option("--samples", mopts.samples, "Monte Carlo sample count");
    moments->add_option("--seed", mopts.seed, "sampling seed");

    auto* catalog = app.add_subcommand("catalog", "list the seven experiments");
    (void)catalog;

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opts);
        if (compare->parsed()) return cmd_compare(opts);
        if (theory->parsed()) return cmd_theory(opts);
        if (moments->parsed()) return cmd_moments(mopts);
        if (catalog->parsed()) return cmd_catalog();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
