#pragma once

#include "oplmf/core.hpp"

namespace oplmf {

// Fixed-step LMF.
struct LmfConfig {
    double mu = 0.005;
};

class LmfFilter {
  public:
    explicit LmfFilter(LmfConfig cfg);

    // Returns the step-size used.
    double update(FilterState& state, double err);

  private:
    LmfConfig cfg_;
};

// LMF normalized by the squared input power (eps + (X^T X)^2).
struct NlmfConfig {
    double mu = 0.005;
    double epsilon = 1e-6;
};

class NlmfFilter {
  public:
    explicit NlmfFilter(NlmfConfig cfg);

    double update(FilterState& state, double err);

  private:
    NlmfConfig cfg_;
};

// Variable step-size LMF driven by a quotient of smoothed error statistics:
//   P(n) = a P(n-1) + (1-a) e(n) e(n-1)        (error autocorrelation)
//   Q(n) = b Q(n-1) + (1-b) e(n)^2             (error power, floored)
//   mu(n) = clamp(alpha mu(n-1) + gamma_q P/Q, mu_min, mu_max)
struct VsslmfqConfig {
    double alpha = 0.997;
    double gamma_q = 0.000002;
    double a = 0.95;
    double b = 0.995;
    double mu_max = 0.005;
    double mu_min = 0.0;

    void validate() const;
};

class VsslmfqFilter {
  public:
    explicit VsslmfqFilter(VsslmfqConfig cfg);

    double update(FilterState& state, double err);

    double step_size() const { return mu_; }

  private:
    VsslmfqConfig cfg_;
    double p_ = 0.0;
    double q_ = 1e-6;
    double mu_ = 0.0;
    double err_prev_ = 0.0;
};

}  // namespace oplmf
