#pragma once

#include <cstdint>
#include <span>

#include "oplmf/core.hpp"

namespace oplmf {

// Noise moment triple (E[rho^2], E[rho^4], E[rho^6]); raw moments about zero.
struct MomentSet {
    double sigma_rho_sq;
    double m4;
    double m6;

    MomentSet(double sigma_rho_sq_, double m4_, double m6_);
};

// Exponentially smoothed estimate of the regressor inner product X^T X.
// The smoothed value tracks L * sigma_x^2 for stationary input; per_tap()
// divides by L to recover the per-sample power used by the moment formulas.
class PowerEstimate {
  public:
    PowerEstimate(double gamma, std::size_t taps);

    void update(const RegressorWindow& window);

    double gamma() const { return gamma_; }
    double raw() const { return smoothed_; }
    double per_tap() const { return smoothed_ / static_cast<double>(taps_); }

  private:
    double gamma_;
    double smoothed_ = 0.0;
    std::size_t taps_;
};

// Contraction factor multiplying MSD(n) in the one-step MSD map.
double f_factor(std::size_t taps, double mu, double sigma_x_sq,
                const MomentSet& moments);

// Coefficient of the MSD(n)^2 term.
double g_factor(std::size_t taps, double mu, double sigma_x_sq,
                double sigma_rho_sq);

// Additive drive term mu^2 L sigma_x^2 E[rho^6].
double t_term(std::size_t taps, double mu, double sigma_x_sq, double m6);

// Step-size at the vertex of the f_factor parabola (fastest convergence).
double fastest_convergence_step(std::size_t taps, double sigma_x_sq,
                                const MomentSet& moments);

// Step-size ceiling keeping the contraction factor inside the unit interval.
// Numerically identical to fastest_convergence_step; kept as a separate
// entry point because it plays a different role (clamping, not scheduling).
double stability_bound(std::size_t taps, double sigma_x_sq,
                       const MomentSet& moments);

// One-step-optimal step-size: the argmin over mu of the full cubic MSD map.
double optimal_step(double msd, std::size_t taps, double sigma_x_sq,
                    const MomentSet& moments);

// Full cubic one-step MSD propagation, clamped at zero from below.
double propagate_msd(double msd, std::size_t taps, double sigma_x_sq, double mu,
                     const MomentSet& moments);

// Truncated (linear-in-MSD) variant, suitable for steady-state analysis only.
double propagate_msd_truncated(double msd, std::size_t taps, double sigma_x_sq,
                               double mu, const MomentSet& moments);

// Excess mean-square error: sigma_rho^2 + sigma_x^2 * MSD.
double emse(double msd, double sigma_x_sq, double sigma_rho_sq);

// Self-propagated model of the MSD trajectory. Counts (and clamps) any
// numerical undershoot below zero.
class MsdModel {
  public:
    MsdModel(double initial_msd, std::size_t taps, MomentSet moments);

    double value() const { return msd_; }
    std::uint64_t clamp_events() const { return clamp_events_; }

    void advance(double sigma_x_sq, double mu);

  private:
    double msd_;
    std::size_t taps_;
    MomentSet moments_;
    std::uint64_t clamp_events_ = 0;
};

enum class MsdMode { Oracle, Model };

struct OplmfConfig {
    double gamma = 0.98;
    MsdMode msd_mode = MsdMode::Oracle;
    // Model-mode initial MSD; negative requests the default ||W(0)||^2,
    // falling back to L when the initial weights are all zero.
    double msd_init = -1.0;
    bool clamp_to_stability = true;
};

// Variable step-size LMF filter driven by the one-step-optimal schedule.
class OplmfFilter {
  public:
    OplmfFilter(std::size_t taps, MomentSet moments, OplmfConfig cfg = {});

    struct Diagnostics {
        double mu;
        double sigma_x_sq;   // per-tap estimate
        double model_msd;    // NaN in oracle mode
        double oracle_msd;   // NaN in model mode
    };

    // Runs one adaptation step. The window in `state` must already hold the
    // current regressor. Oracle mode needs the true system weights.
    Diagnostics update(FilterState& state, double err,
                       std::span<const double> w_true = {});

    const OplmfConfig& config() const { return cfg_; }
    const MomentSet& moments() const { return moments_; }
    const MsdModel& model() const { return model_; }

  private:
    std::size_t taps_;
    MomentSet moments_;
    OplmfConfig cfg_;
    PowerEstimate power_;
    MsdModel model_;
};

}  // namespace oplmf
