#include "oplmf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oplmf {

MomentSet::MomentSet(double sigma_rho_sq_, double m4_, double m6_)
    : sigma_rho_sq(sigma_rho_sq_), m4(m4_), m6(m6_) {
    if (!std::isfinite(sigma_rho_sq) || !std::isfinite(m4) || !std::isfinite(m6) ||
        sigma_rho_sq < 0.0 || m6 < 0.0) {
        throw ConfigError("moment set entries must be finite and non-negative");
    }
    // Jensen: E[rho^4] >= (E[rho^2])^2. Small slack for Monte Carlo estimates.
    if (m4 < sigma_rho_sq * sigma_rho_sq * (1.0 - 1e-9)) {
        throw ConfigError("moment set violates E[rho^4] >= (E[rho^2])^2");
    }
}

PowerEstimate::PowerEstimate(double gamma, std::size_t taps)
    : gamma_(gamma), taps_(taps) {
    if (taps < 1) {
        throw ConfigError("tap count must be >= 1");
    }
    const double lower = 1.0 - 1.0 / (2.0 * static_cast<double>(taps));
    if (!(gamma >= lower && gamma < 1.0)) {
        throw ConfigError("smoothing factor must lie in [1 - 1/(2L), 1)");
    }
}

void PowerEstimate::update(const RegressorWindow& window) {
    smoothed_ = gamma_ * smoothed_ + (1.0 - gamma_) * window.power();
}

double f_factor(std::size_t taps, double mu, double sigma_x_sq,
                const MomentSet& moments) {
    const double L = static_cast<double>(taps);
    const double sx4 = sigma_x_sq * sigma_x_sq;
    return 1.0 + 15.0 * (L + 2.0) * mu * mu * sx4 * moments.m4 -
           6.0 * mu * sigma_x_sq * moments.sigma_rho_sq;
}

double g_factor(std::size_t taps, double mu, double sigma_x_sq,
                double sigma_rho_sq) {
    const double L = static_cast<double>(taps);
    const double sx4 = sigma_x_sq * sigma_x_sq;
    const double sx6 = sx4 * sigma_x_sq;
    return 15.0 * (3.0 * L + 12.0) * mu * mu * sx6 * sigma_rho_sq -
           6.0 * mu * sx4;
}

double t_term(std::size_t taps, double mu, double sigma_x_sq, double m6) {
    return mu * mu * static_cast<double>(taps) * sigma_x_sq * m6;
}

double fastest_convergence_step(std::size_t taps, double sigma_x_sq,
                                const MomentSet& moments) {
    if (sigma_x_sq <= 0.0 || moments.m4 <= 0.0) {
        throw DegenerateInputError("fastest step needs sigma_x^2 > 0 and E[rho^4] > 0");
    }
    const double L = static_cast<double>(taps);
    return moments.sigma_rho_sq / (5.0 * (L + 2.0) * sigma_x_sq * moments.m4);
}

double stability_bound(std::size_t taps, double sigma_x_sq,
                       const MomentSet& moments) {
    return fastest_convergence_step(taps, sigma_x_sq, moments);
}

double optimal_step(double msd, std::size_t taps, double sigma_x_sq,
                    const MomentSet& moments) {
    const double L = static_cast<double>(taps);
    const double sx2 = sigma_x_sq;
    const double sx4 = sx2 * sx2;
    const double denom =
        15.0 * sx2 * msd *
            ((L + 2.0) * moments.m4 +
             (3.0 * L + 12.0) * sx2 * moments.sigma_rho_sq * msd +
             (L + 6.0) * sx4 * msd * msd) +
        L * moments.m6;
    if (denom <= 0.0) {
        return 0.0;
    }
    const double mu = 3.0 * msd * (moments.sigma_rho_sq + sx2 * msd) / denom;
    return std::max(mu, 0.0);
}

double propagate_msd(double msd, std::size_t taps, double sigma_x_sq, double mu,
                     const MomentSet& moments) {
    const double L = static_cast<double>(taps);
    const double sx8 = std::pow(sigma_x_sq, 4);
    const double next =
        f_factor(taps, mu, sigma_x_sq, moments) * msd +
        g_factor(taps, mu, sigma_x_sq, moments.sigma_rho_sq) * msd * msd +
        (15.0 * L + 90.0) * mu * mu * sx8 * msd * msd * msd +
        t_term(taps, mu, sigma_x_sq, moments.m6);
    return std::max(next, 0.0);
}

double propagate_msd_truncated(double msd, std::size_t taps, double sigma_x_sq,
                               double mu, const MomentSet& moments) {
    const double next = f_factor(taps, mu, sigma_x_sq, moments) * msd +
                        t_term(taps, mu, sigma_x_sq, moments.m6);
    return std::max(next, 0.0);
}

double emse(double msd, double sigma_x_sq, double sigma_rho_sq) {
    return sigma_rho_sq + sigma_x_sq * msd;
}

MsdModel::MsdModel(double initial_msd, std::size_t taps, MomentSet moments)
    : msd_(initial_msd), taps_(taps), moments_(moments) {
    if (!(initial_msd >= 0.0)) {
        throw ConfigError("model MSD must start non-negative");
    }
}

void MsdModel::advance(double sigma_x_sq, double mu) {
    const double raw =
        f_factor(taps_, mu, sigma_x_sq, moments_) * msd_ +
        g_factor(taps_, mu, sigma_x_sq, moments_.sigma_rho_sq) * msd_ * msd_ +
        (15.0 * static_cast<double>(taps_) + 90.0) * mu * mu *
            std::pow(sigma_x_sq, 4) * msd_ * msd_ * msd_ +
        t_term(taps_, mu, sigma_x_sq, moments_.m6);
    if (raw < 0.0) {
        ++clamp_events_;
        msd_ = 0.0;
    } else {
        msd_ = raw;
    }
}

namespace {

double resolve_msd_init(const OplmfConfig& cfg, std::size_t taps) {
    if (cfg.msd_mode == MsdMode::Oracle) {
        return 0.0;  // unused
    }
    if (cfg.msd_init > 0.0) {
        return cfg.msd_init;
    }
    if (cfg.msd_init < 0.0) {
        // Default: ||W(0)||^2 is zero for zero-initialized weights, so fall
        // back to L as a generic large starting deviation.
        return static_cast<double>(taps);
    }
    throw ConfigError("model-mode initial MSD must be positive");
}

}  // namespace

OplmfFilter::OplmfFilter(std::size_t taps, MomentSet moments, OplmfConfig cfg)
    : taps_(taps),
      moments_(moments),
      cfg_(cfg),
      power_(cfg.gamma, taps),
      model_(resolve_msd_init(cfg, taps), taps, moments) {}

OplmfFilter::Diagnostics OplmfFilter::update(FilterState& state, double err,
                                             std::span<const double> w_true) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    power_.update(state.window);
    const double sx2 = power_.per_tap();

    double oracle_msd = nan;
    double msd;
    if (cfg_.msd_mode == MsdMode::Oracle) {
        if (w_true.size() != state.weights.size()) {
            throw LengthMismatchError("oracle mode needs the true weight vector");
        }
        oracle_msd = squared_deviation(w_true, std::span<const double>(state.weights));
        msd = oracle_msd;
    } else {
        msd = model_.value();
    }

    double mu = 0.0;
    if (sx2 > 0.0) {
        mu = optimal_step(msd, taps_, sx2, moments_);
        if (cfg_.clamp_to_stability && moments_.m4 > 0.0) {
            mu = std::min(mu, stability_bound(taps_, sx2, moments_));
        }
    }

    lmf_update(state, mu, err);
    if (cfg_.msd_mode == MsdMode::Model) {
        model_.advance(sx2, mu);
    }
    return Diagnostics{mu, sx2,
                       cfg_.msd_mode == MsdMode::Model ? model_.value() : nan,
                       oracle_msd};
}

}  // namespace oplmf
