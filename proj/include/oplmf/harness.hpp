#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oplmf/baselines.hpp"
#include "oplmf/engine.hpp"
#include "oplmf/noise.hpp"

namespace oplmf {

// Unknown system under identification: fixed base taps, optionally perturbed
// every step by i.i.d. Gaussian tap noise. The default reading redraws the
// perturbation around the base each step; `cumulative_walk` accumulates it
// instead.
struct SystemModel {
    enum class Variant { TimeInvariant, RandomWalk };

    WeightVector w_base = {0.8, 0.2, -0.7, 0.2, 0.1};
    Variant variant = Variant::TimeInvariant;
    double sigma_tau_sq = 0.01;
    bool cumulative_walk = false;
};

// Excitation: white Gaussian (unit variance) or AR(1) driven by it.
struct InputModel {
    enum class Kind { WhiteGaussian, Ar1 };

    Kind kind = Kind::WhiteGaussian;
    double ar_coefficient = 0.5;

    double variance() const;

    // E[(w^T X)^2] for stationary input with this model's autocorrelation.
    double output_power(const WeightVector& w) const;
};

struct FilterAlgorithm {
    std::variant<LmfConfig, NlmfConfig, VsslmfqConfig, OplmfConfig> config;

    std::string tag() const;
};

struct ExperimentConfig {
    int id = 0;
    std::string name;
    SystemModel system;
    InputModel input;
    NoiseSpec noise;
    double snr_db = 0.0;
    // When true the noise scale is derived from snr_db and the base-system
    // output power; when false the configured scale is used as-is and snr_db
    // is informational.
    bool apply_snr_scaling = true;
    std::vector<FilterAlgorithm> algorithms;
    int runs = 50;
    int iterations = 5000;
    std::uint64_t seed = 1;

    // Output power of the time-invariant part of the system.
    double signal_power() const;

    // Noise spec actually sampled (SNR-scaled when requested).
    NoiseSpec effective_noise() const;

    void validate() const;
};

struct MsdTrace {
    std::vector<double> msd_db_sim;     // linear-averaged across runs, in dB
    std::vector<double> msd_db_theory;  // model recursion; NaN for baselines
    std::vector<double> msd_error;      // |sim - theory| linear; NaN likewise
    std::vector<double> mu_mean;        // mean step-size across included runs
    int divergence_count = 0;
    int runs = 0;
};

// Deterministic model-recursion trajectory (no simulation).
struct TheoryTrace {
    std::vector<double> msd_linear;
    std::vector<double> mu;
};

TheoryTrace theory_trajectory(std::size_t taps, const MomentSet& moments,
                              double sigma_x_sq, double msd0, int iterations,
                              bool clamp_to_stability);

// Monte Carlo run of one experiment; one trace per configured algorithm.
// Diverged runs are excluded from all averages and counted.
std::map<std::string, MsdTrace> run_experiment(const ExperimentConfig& cfg);

// Mean of the final window_fraction of the dB trace.
double steady_state_msd(const MsdTrace& trace, double window_fraction = 0.1);

// Per-iteration |simulated - theoretical| linear MSD, recomputed from the
// dB columns.
std::vector<double> theory_error(const MsdTrace& trace);

// The seven standard benchmark experiments.
std::vector<ExperimentConfig> experiment_catalog();

// Literature-reported steady-state MSD values for the catalog experiments.
struct ReferenceMsd {
    double nlmf;
    std::optional<double> vsslmfq;  // empty: reported as divergent
    double oplmf;
};
std::optional<ReferenceMsd> reference_msd(int experiment_id);

// --- serialization ------------------------------------------------------

ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& cfg,
                            const std::string& path);

// CSV schema: iteration,algorithm,msd_db_sim,msd_db_theory,msd_error,mu_mean
// (NaN cells are left empty). Algorithms appear in configuration order.
void write_trace_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::map<std::string, MsdTrace>& traces);

// Human-readable summary: measured steady-state MSD, divergence counts and,
// for catalog experiments, the reference values with deltas.
std::string format_summary(const ExperimentConfig& cfg,
                           const std::map<std::string, MsdTrace>& traces);

}  // namespace oplmf
