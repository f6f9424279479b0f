#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oplmf {

struct LengthMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnscalableError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when an update is attempted on a filter that has already diverged.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using WeightVector = std::vector<double>;

// Per-tap magnitude guard; anything past this is treated as divergence.
inline constexpr double kDivergenceGuard = 1e6;

// MSD floor in dB for an exactly-zero deviation.
inline constexpr double kMsdFloorDb = -300.0;

// Tapped delay line holding the L most recent input samples, newest first.
class RegressorWindow {
  public:
    explicit RegressorWindow(std::size_t length);

    // Shifts in one sample, dropping the oldest.
    void push(double sample);

    double operator[](std::size_t i) const { return samples_[i]; }
    std::size_t size() const { return samples_.size(); }
    std::span<const double> samples() const { return samples_; }

    // X^T X over the current window.
    double power() const;

  private:
    std::vector<double> samples_;
};

struct FilterState {
    WeightVector weights;
    RegressorWindow window;
    std::uint64_t iteration = 0;
    bool diverged = false;

    explicit FilterState(std::size_t length)
        : weights(length, 0.0), window(length) {}
};

// Filter output y = W^T X.
double predict(const FilterState& state);

// e = d - y.
double error_signal(double desired, double output);

// Cubic-error stochastic gradient step: W += mu * X * e^3.
// Returns false and freezes the state (pre-update weights kept) when the
// result is non-finite or exceeds the magnitude guard. Calling on an
// already-diverged state throws DivergenceError.
bool lmf_update(FilterState& state, double step_size, double err,
                double guard = kDivergenceGuard);

// ||a - b||^2.
double squared_deviation(const WeightVector& a, const WeightVector& b);
double squared_deviation(std::span<const double> a, std::span<const double> b);

// 10 log10 ||w_true - w_est||^2, floored at kMsdFloorDb.
double msd_db(const WeightVector& w_true, const WeightVector& w_est);

// dB conversion of an already-linear squared deviation, same floor.
double linear_to_db(double squared_norm);

}  // namespace oplmf
