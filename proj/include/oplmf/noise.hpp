#pragma once

#include <random>
#include <string>

#include "oplmf/engine.hpp"

namespace oplmf {

enum class NoiseFamily { Gaussian, Uniform, Binary, Rayleigh, Poisson };

std::string to_string(NoiseFamily family);
NoiseFamily noise_family_from_string(const std::string& name);

// Which fourth/sixth moment pair to use for the zero-mean uniform family.
// `Integrated` is the analytically correct pair (9/5, 27/7); `Transposed`
// swaps them, matching a commonly circulated (erroneous) listing.
enum class UniformMomentConvention { Integrated, Transposed };

// One additive-noise family with its scale parameter.
//   Gaussian / Binary : scale = sigma
//   Uniform           : scale = half-width h; support (0, 2h), or (-h, h)
//                       when centered
//   Rayleigh          : scale = sigma (Rayleigh scale parameter)
//   Poisson           : scale = lambda
// `centered` subtracts the family mean from every draw; moments() then
// reports central moments instead of raw moments about zero.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    double scale = 1.0;
    bool centered = false;

    void validate() const;

    double mean() const;
    double variance() const;

    // Raw moment E[rho^k] about zero of the uncentered family, k in 1..6.
    double raw_moment(int k,
                      UniformMomentConvention conv =
                          UniformMomentConvention::Integrated) const;

    // (E[rho^2], E[rho^4], E[rho^6]) of the emitted samples: raw moments
    // when uncentered, central moments when centered.
    MomentSet moments(UniformMomentConvention conv =
                          UniformMomentConvention::Integrated) const;
};

// One draw from the family (mean-subtracted when spec.centered).
double sample(const NoiseSpec& spec, std::mt19937_64& rng);

// Rescales the spec so the emitted variance equals
// signal_power / 10^(snr_db / 10).
NoiseSpec scale_for_snr(const NoiseSpec& spec, double signal_power,
                        double snr_db);

}  // namespace oplmf
