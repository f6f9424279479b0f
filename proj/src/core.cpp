#include "oplmf/core.hpp"

#include <cmath>

namespace oplmf {

RegressorWindow::RegressorWindow(std::size_t length) : samples_(length, 0.0) {
    if (length < 1) {
        throw LengthMismatchError("window length must be >= 1");
    }
}

void RegressorWindow::push(double sample) {
    for (std::size_t i = samples_.size() - 1; i > 0; --i) {
        samples_[i] = samples_[i - 1];
    }
    samples_[0] = sample;
}

double RegressorWindow::power() const {
    double acc = 0.0;
    for (double s : samples_) {
        acc += s * s;
    }
    return acc;
}

double predict(const FilterState& state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        acc += state.weights[i] * state.window[i];
    }
    return acc;
}

double error_signal(double desired, double output) {
    return desired - output;
}

bool lmf_update(FilterState& state, double step_size, double err, double guard) {
    if (state.diverged) {
        throw DivergenceError("update refused: filter has diverged");
    }
    const double e3 = err * err * err;
    bool ok = true;
    WeightVector next = state.weights;
    for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] += step_size * state.window[i] * e3;
        if (!std::isfinite(next[i]) || std::abs(next[i]) > guard) {
            ok = false;
        }
    }
    state.iteration += 1;
    if (!ok) {
        state.diverged = true;  // weights stay at their last finite value
        return false;
    }
    state.weights = std::move(next);
    return true;
}

double squared_deviation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw LengthMismatchError("weight vectors differ in length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double squared_deviation(const WeightVector& a, const WeightVector& b) {
    return squared_deviation(std::span<const double>(a), std::span<const double>(b));
}

double linear_to_db(double squared_norm) {
    if (squared_norm < 1e-30) {
        return kMsdFloorDb;
    }
    return 10.0 * std::log10(squared_norm);
}

double msd_db(const WeightVector& w_true, const WeightVector& w_est) {
    return linear_to_db(squared_deviation(w_true, w_est));
}

}  // namespace oplmf
