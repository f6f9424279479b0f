#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oplmf/harness.hpp"

using namespace oplmf;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg = experiment_catalog()[0];
    cfg.runs = 2;
    cfg.iterations = 60;
    return cfg;
}

}  // namespace

TEST_CASE("input model variance") {
    InputModel white;
    CHECK(white.variance() == 1.0);
    InputModel ar;
    ar.kind = InputModel::Kind::Ar1;
    CHECK(ar.variance() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("output power of the standard system") {
    const WeightVector w = {0.8, 0.2, -0.7, 0.2, 0.1};
    InputModel white;
    CHECK(white.output_power(w) == doctest::Approx(1.22));
    InputModel ar;
    ar.kind = InputModel::Kind::Ar1;
    CHECK(ar.output_power(w) == doctest::Approx(1.1733333333333333).epsilon(1e-12));
}

TEST_CASE("algorithm tags") {
    CHECK(FilterAlgorithm{LmfConfig{}}.tag() == "LMF");
    CHECK(FilterAlgorithm{NlmfConfig{}}.tag() == "NLMF");
    CHECK(FilterAlgorithm{VsslmfqConfig{}}.tag() == "VSSLMFQ");
    CHECK(FilterAlgorithm{OplmfConfig{}}.tag() == "OPLMF");
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg = tiny_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.runs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.algorithms.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.system.w_base.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("effective noise honours the scaling switch") {
    ExperimentConfig cfg = tiny_config();
    REQUIRE(cfg.apply_snr_scaling);
    const NoiseSpec scaled = cfg.effective_noise();
    const double target = cfg.signal_power() / std::pow(10.0, cfg.snr_db / 10.0);
    CHECK(scaled.variance() == doctest::Approx(target).epsilon(1e-10));

    cfg.apply_snr_scaling = false;
    const NoiseSpec raw = cfg.effective_noise();
    CHECK(raw.scale == cfg.noise.scale);
}

TEST_CASE("experiment catalog shape") {
    const auto catalog = experiment_catalog();
    REQUIRE(catalog.size() == 7);
    for (int i = 0; i < 7; ++i) {
        const auto& cfg = catalog[i];
        CHECK(cfg.id == i + 1);
        CHECK(cfg.name == "experiment" + std::to_string(i + 1));
        CHECK(cfg.runs == 50);
        CHECK(cfg.iterations == 5000);
        CHECK(cfg.seed == 1000 + static_cast<std::uint64_t>(i + 1));
        REQUIRE(cfg.algorithms.size() == 3);
        CHECK(cfg.algorithms[0].tag() == "NLMF");
        CHECK(cfg.algorithms[1].tag() == "VSSLMFQ");
        CHECK(cfg.algorithms[2].tag() == "OPLMF");
        CHECK(cfg.system.w_base == WeightVector{0.8, 0.2, -0.7, 0.2, 0.1});
        CHECK_NOTHROW(cfg.validate());
    }
    // 1-3: stationary system, correlated input, uniform noise at 3/1.5/0 dB
    for (int i = 0; i < 3; ++i) {
        CHECK(catalog[i].system.variant == SystemModel::Variant::TimeInvariant);
        CHECK(catalog[i].input.kind == InputModel::Kind::Ar1);
        CHECK(catalog[i].noise.family == NoiseFamily::Uniform);
        CHECK(catalog[i].apply_snr_scaling);
    }
    CHECK(catalog[0].snr_db == 3.0);
    CHECK(catalog[1].snr_db == 1.5);
    CHECK(catalog[2].snr_db == 0.0);
    // 4-7: random-walk system
    for (int i = 3; i < 7; ++i) {
        CHECK(catalog[i].system.variant == SystemModel::Variant::RandomWalk);
        CHECK(catalog[i].system.sigma_tau_sq == 0.01);
    }
    CHECK(catalog[3].input.kind == InputModel::Kind::WhiteGaussian);
    CHECK(catalog[3].noise.family == NoiseFamily::Gaussian);
    CHECK(catalog[4].noise.family == NoiseFamily::Binary);
    CHECK(catalog[5].noise.family == NoiseFamily::Rayleigh);
    CHECK(catalog[5].noise.scale == 3.0);
    CHECK_FALSE(catalog[5].apply_snr_scaling);
    CHECK(catalog[6].noise.family == NoiseFamily::Poisson);
    CHECK(catalog[6].noise.scale == 1.0);
    CHECK_FALSE(catalog[6].apply_snr_scaling);
}

TEST_CASE("published reference values") {
    const auto r1 = reference_msd(1);
    REQUIRE(r1.has_value());
    CHECK(r1->nlmf == doctest::Approx(-28.51));
    REQUIRE(r1->vsslmfq.has_value());
    CHECK(*r1->vsslmfq == doctest::Approx(-31.53));
    CHECK(r1->oplmf == doctest::Approx(-60.91));
    const auto r2 = reference_msd(2);
    REQUIRE(r2.has_value());
    CHECK_FALSE(r2->vsslmfq.has_value());  // reported divergent
    CHECK_FALSE(reference_msd(0).has_value());
    CHECK_FALSE(reference_msd(8).has_value());
}

TEST_CASE("theory trajectory is finite, positive, decreasing") {
    const MomentSet m(1.0, 3.0, 15.0);
    const TheoryTrace t = theory_trajectory(5, m, 1.0, 1.22, 500, true);
    REQUIRE(t.msd_linear.size() == 500);
    REQUIRE(t.mu.size() == 500);
    double prev = 1.22;
    for (int n = 0; n < 500; ++n) {
        CHECK(std::isfinite(t.msd_linear[n]));
        CHECK(t.msd_linear[n] > 0.0);
        CHECK(t.msd_linear[n] <= prev);
        CHECK(t.mu[n] > 0.0);
        CHECK(t.mu[n] <= stability_bound(5, 1.0, m) * (1.0 + 1e-12));
        prev = t.msd_linear[n];
    }
}

TEST_CASE("run_experiment is deterministic and well-formed") {
    const ExperimentConfig cfg = tiny_config();
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    REQUIRE(a.size() == 3);
    REQUIRE(a.count("NLMF") == 1);
    REQUIRE(a.count("VSSLMFQ") == 1);
    REQUIRE(a.count("OPLMF") == 1);
    for (const auto& [tag, trace] : a) {
        CHECK(trace.msd_db_sim.size() == static_cast<std::size_t>(cfg.iterations));
        CHECK(trace.runs == cfg.runs);
        const auto& other = b.at(tag);
        CHECK(trace.divergence_count == other.divergence_count);
        for (int n = 0; n < cfg.iterations; ++n) {
            CHECK(trace.msd_db_sim[n] == other.msd_db_sim[n]);
            CHECK(trace.mu_mean[n] == other.mu_mean[n]);
        }
    }
    // theory columns only on the OPLMF trace
    CHECK(std::isnan(a.at("NLMF").msd_db_theory[0]));
    CHECK_FALSE(std::isnan(a.at("OPLMF").msd_db_theory[0]));
    CHECK_FALSE(std::isnan(a.at("OPLMF").msd_error[0]));
}

TEST_CASE("changing the seed changes the trace") {
    ExperimentConfig cfg = tiny_config();
    const auto a = run_experiment(cfg);
    cfg.seed += 1;
    const auto b = run_experiment(cfg);
    bool any_diff = false;
    for (int n = 0; n < cfg.iterations; ++n) {
        any_diff = any_diff ||
                   a.at("NLMF").msd_db_sim[n] != b.at("NLMF").msd_db_sim[n];
    }
    CHECK(any_diff);
}

TEST_CASE("diverged runs are excluded and counted") {
    ExperimentConfig cfg = tiny_config();
    cfg.algorithms = {FilterAlgorithm{LmfConfig{50.0}}};  // wildly unstable
    cfg.runs = 4;
    cfg.iterations = 200;
    const auto traces = run_experiment(cfg);
    const MsdTrace& t = traces.at("LMF");
    CHECK(t.divergence_count == 4);
    for (double v : t.msd_db_sim) {
        CHECK(std::isnan(v));
    }
    const std::string summary = format_summary(cfg, traces);
    CHECK(summary.find("divergence") != std::string::npos);
}

TEST_CASE("steady_state_msd averages the tail window") {
    MsdTrace t;
    for (int n = 0; n < 10; ++n) {
        t.msd_db_sim.push_back(static_cast<double>(n));
    }
    CHECK(steady_state_msd(t, 0.1) == doctest::Approx(9.0));
    CHECK(steady_state_msd(t, 0.5) == doctest::Approx(7.0));
    CHECK(steady_state_msd(t, 1.0) == doctest::Approx(4.5));
    MsdTrace empty;
    CHECK_THROWS_AS(steady_state_msd(empty, 0.1), ConfigError);
}

TEST_CASE("theory_error matches the stored linear error column") {
    ExperimentConfig cfg = tiny_config();
    cfg.algorithms = {FilterAlgorithm{OplmfConfig{}}};
    const auto traces = run_experiment(cfg);
    const MsdTrace& t = traces.at("OPLMF");
    const auto err = theory_error(t);
    REQUIRE(err.size() == t.msd_error.size());
    for (std::size_t n = 0; n < err.size(); ++n) {
        CHECK(err[n] == doctest::Approx(t.msd_error[n]).epsilon(1e-6));
    }
}

TEST_CASE("config json round trip") {
    const fs::path path = fs::temp_directory_path() / "oplmf_cfg_roundtrip.json";
    const ExperimentConfig cfg = experiment_catalog()[5];
    save_experiment_config(cfg, path.string());
    const ExperimentConfig back = load_experiment_config(path.string());
    CHECK(back.id == cfg.id);
    CHECK(back.name == cfg.name);
    CHECK(back.system.w_base == cfg.system.w_base);
    CHECK(back.system.variant == cfg.system.variant);
    CHECK(back.system.sigma_tau_sq == cfg.system.sigma_tau_sq);
    CHECK(back.input.kind == cfg.input.kind);
    CHECK(back.input.ar_coefficient == cfg.input.ar_coefficient);
    CHECK(back.noise.family == cfg.noise.family);
    CHECK(back.noise.scale == cfg.noise.scale);
    CHECK(back.snr_db == cfg.snr_db);
    CHECK(back.apply_snr_scaling == cfg.apply_snr_scaling);
    REQUIRE(back.algorithms.size() == cfg.algorithms.size());
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        CHECK(back.algorithms[i].tag() == cfg.algorithms[i].tag());
    }
    CHECK(back.runs == cfg.runs);
    CHECK(back.iterations == cfg.iterations);
    CHECK(back.seed == cfg.seed);
    fs::remove(path);
}

TEST_CASE("config loading failure modes") {
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/cfg.json"), ConfigError);
    const fs::path path = fs::temp_directory_path() / "oplmf_cfg_bad.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_experiment_config(path.string()), ConfigError);
    std::ofstream(path) << "{\"noise\": {\"family\": \"gaussian\", \"scale\": 1.0}}";
    CHECK_THROWS_AS(load_experiment_config(path.string()), ConfigError);
    fs::remove(path);
}

TEST_CASE("trace csv layout") {
    ExperimentConfig cfg = tiny_config();
    cfg.iterations = 5;
    const auto traces = run_experiment(cfg);
    std::ostringstream out;
    write_trace_csv(out, cfg, traces);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "iteration,algorithm,msd_db_sim,msd_db_theory,msd_error,mu_mean");
    int rows = 0;
    std::string first_alg;
    while (std::getline(in, line)) {
        ++rows;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const std::string alg = line.substr(c1 + 1, c2 - c1 - 1);
        if (rows == 1) {
            first_alg = alg;
        }
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == 5 * 3);
    CHECK(first_alg == cfg.algorithms[0].tag());  // configuration order
}

TEST_CASE("summary reports references for catalog experiments") {
    const ExperimentConfig cfg = tiny_config();
    const auto traces = run_experiment(cfg);
    const std::string s = format_summary(cfg, traces);
    CHECK(s.find("NLMF") != std::string::npos);
    CHECK(s.find("VSSLMFQ") != std::string::npos);
    CHECK(s.find("OPLMF") != std::string::npos);
    CHECK(s.find("-28.51") != std::string::npos);
    CHECK(s.find("-60.91") != std::string::npos);
}
