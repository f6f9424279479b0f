#include "oplmf/noise.hpp"

#include <cmath>
#include <numbers>

namespace oplmf {

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::Binary: return "binary";
        case NoiseFamily::Rayleigh: return "rayleigh";
        case NoiseFamily::Poisson: return "poisson";
    }
    throw ConfigError("unknown noise family");
}

NoiseFamily noise_family_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::Gaussian;
    if (name == "uniform") return NoiseFamily::Uniform;
    if (name == "binary") return NoiseFamily::Binary;
    if (name == "rayleigh") return NoiseFamily::Rayleigh;
    if (name == "poisson") return NoiseFamily::Poisson;
    throw ConfigError("unknown noise family: " + name);
}

void NoiseSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError("noise scale must be positive and finite");
    }
}

double NoiseSpec::mean() const {
    switch (family) {
        case NoiseFamily::Gaussian:
        case NoiseFamily::Binary:
            return 0.0;
        case NoiseFamily::Uniform:
            return scale;  // support (0, 2h)
        case NoiseFamily::Rayleigh:
            return scale * std::sqrt(std::numbers::pi / 2.0);
        case NoiseFamily::Poisson:
            return scale;
    }
    throw ConfigError("unknown noise family");
}

double NoiseSpec::raw_moment(int k, UniformMomentConvention conv) const {
    validate();
    if (k < 1 || k > 6) {
        throw ConfigError("raw moments available for k in 1..6 only");
    }
    const double s = scale;
    switch (family) {
        case NoiseFamily::Gaussian: {
            // 0, s^2, 0, 3 s^4, 0, 15 s^6
            static constexpr double coef[7] = {1, 0, 1, 0, 3, 0, 15};
            return coef[k] * std::pow(s, k);
        }
        case NoiseFamily::Binary: {
            return (k % 2 == 0) ? std::pow(s, k) : 0.0;
        }
        case NoiseFamily::Uniform: {
            (void)conv;  // convention applies to the centered pair; see moments()
            const double w = 2.0 * s;
            return std::pow(w, k) / static_cast<double>(k + 1);
        }
        case NoiseFamily::Rayleigh: {
            return std::pow(s, k) * std::pow(2.0, k / 2.0) *
                   std::tgamma(1.0 + k / 2.0);
        }
        case NoiseFamily::Poisson: {
            const double l = s;
            const double l2 = l * l, l3 = l2 * l, l4 = l3 * l, l5 = l4 * l,
                         l6 = l5 * l;
            switch (k) {
                case 1: return l;
                case 2: return l + l2;
                case 3: return l + 3 * l2 + l3;
                case 4: return l + 7 * l2 + 6 * l3 + l4;
                case 5: return l + 15 * l2 + 25 * l3 + 10 * l4 + l5;
                case 6: return l + 31 * l2 + 90 * l3 + 65 * l4 + 15 * l5 + l6;
            }
            break;
        }
    }
    throw ConfigError("unknown noise family");
}

double NoiseSpec::variance() const {
    const double m1 = mean();
    return raw_moment(2) - m1 * m1;
}

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

// E[(rho - m)^k] from the raw moments about zero.
double central_moment(const NoiseSpec& spec, int k) {
    const double m = spec.mean();
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double raw = (j == 0) ? 1.0 : spec.raw_moment(j);
        acc += binom(k, j) * raw * std::pow(-m, k - j);
    }
    return acc;
}

}  // namespace

MomentSet NoiseSpec::moments(UniformMomentConvention conv) const {
    validate();
    if (family == NoiseFamily::Uniform &&
        conv == UniformMomentConvention::Transposed) {
        const double v = variance();
        const double m2 = centered ? v : raw_moment(2);
        return MomentSet(m2, 27.0 / 7.0 * v * v, 9.0 / 5.0 * v * v * v);
    }
    if (centered) {
        return MomentSet(central_moment(*this, 2), central_moment(*this, 4),
                         central_moment(*this, 6));
    }
    return MomentSet(raw_moment(2), raw_moment(4), raw_moment(6));
}

double sample(const NoiseSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    double v = 0.0;
    switch (spec.family) {
        case NoiseFamily::Gaussian: {
            std::normal_distribution<double> dist(0.0, spec.scale);
            v = dist(rng);
            break;
        }
        case NoiseFamily::Uniform: {
            std::uniform_real_distribution<double> dist(0.0, 2.0 * spec.scale);
            v = dist(rng);
            break;
        }
        case NoiseFamily::Binary: {
            std::uniform_int_distribution<int> dist(0, 1);
            v = dist(rng) ? spec.scale : -spec.scale;
            break;
        }
        case NoiseFamily::Rayleigh: {
            std::uniform_real_distribution<double> dist(0.0, 1.0);
            v = spec.scale * std::sqrt(-2.0 * std::log1p(-dist(rng)));
            break;
        }
        case NoiseFamily::Poisson: {
            std::poisson_distribution<long> dist(spec.scale);
            v = static_cast<double>(dist(rng));
            break;
        }
    }
    if (spec.centered) {
        v -= spec.mean();
    }
    return v;
}

NoiseSpec scale_for_snr(const NoiseSpec& spec, double signal_power,
                        double snr_db) {
    if (!(signal_power > 0.0)) {
        throw DegenerateInputError("signal power must be positive");
    }
    const double target = signal_power / std::pow(10.0, snr_db / 10.0);
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw UnscalableError("target noise variance is not attainable");
    }
    NoiseSpec out = spec;
    switch (spec.family) {
        case NoiseFamily::Gaussian:
        case NoiseFamily::Binary:
            out.scale = std::sqrt(target);
            break;
        case NoiseFamily::Uniform:
            out.scale = std::sqrt(3.0 * target);  // variance of U(0, 2h) is h^2/3
            break;
        case NoiseFamily::Rayleigh:
            out.scale = std::sqrt(target / (2.0 - std::numbers::pi / 2.0));
            break;
        case NoiseFamily::Poisson:
            out.scale = target;  // variance of Poisson(lambda) is lambda
            break;
    }
    return out;
}

}  // namespace oplmf
