#include "oplmf/baselines.hpp"

#include <algorithm>

namespace oplmf {

LmfFilter::LmfFilter(LmfConfig cfg) : cfg_(cfg) {
    if (!(cfg.mu > 0.0)) {
        throw ConfigError("LMF step-size must be positive");
    }
}

double LmfFilter::update(FilterState& state, double err) {
    lmf_update(state, cfg_.mu, err);
    return cfg_.mu;
}

NlmfFilter::NlmfFilter(NlmfConfig cfg) : cfg_(cfg) {
    if (!(cfg.mu > 0.0) || cfg.epsilon < 0.0) {
        throw ConfigError("NLMF needs mu > 0 and epsilon >= 0");
    }
}

double NlmfFilter::update(FilterState& state, double err) {
    const double p = state.window.power();
    const double mu = cfg_.mu / (cfg_.epsilon + p * p);
    lmf_update(state, mu, err);
    return mu;
}

void VsslmfqConfig::validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(a) || !in_unit(b) || !in_unit(alpha)) {
        throw ConfigError("VSSLMFQ smoothing factors must lie in (0, 1)");
    }
    if (!(mu_min <= mu_max)) {
        throw ConfigError("VSSLMFQ needs mu_min <= mu_max");
    }
}

VsslmfqFilter::VsslmfqFilter(VsslmfqConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    mu_ = cfg_.mu_min;
}

double VsslmfqFilter::update(FilterState& state, double err) {
    p_ = cfg_.a * p_ + (1.0 - cfg_.a) * err * err_prev_;
    q_ = std::max(cfg_.b * q_ + (1.0 - cfg_.b) * err * err, 1e-12);
    mu_ = std::clamp(cfg_.alpha * mu_ + cfg_.gamma_q * p_ / q_, cfg_.mu_min,
                     cfg_.mu_max);
    err_prev_ = err;
    lmf_update(state, mu_, err);
    return mu_;
}

}  // namespace oplmf
