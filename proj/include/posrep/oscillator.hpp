#pragma once

#include <complex>
#include <span>

namespace posrep {

/// Periodic time-lattice oscillator: mass, spring constant, spacing, slices.
struct OscillatorParams {
    double mu = 1.0;
    double kappa = 1.0;
    double delta = 1.0;
    int T = 1;

    void validate() const;
};

/// Mode frequency argument in the harmonic quadratic coefficient: the
/// Fourier-consistent 2*pi*k/T, or the bare k.
enum class OmegaConvention { two_pi_k_over_T, literal_k };

double mode_frequency(int k, int T, OmegaConvention conv);

/// exp{ i sum_t [ mu (x_t - x_{t+1})^2 / (2 delta) - kappa x_t^4 delta ] },
/// x_{T+1} = x_1. The complex overload is the analytic continuation used on
/// rotated contours.
std::complex<double> anharmonic_weight(const OscillatorParams& p, std::span<const double> x);
std::complex<double> anharmonic_weight(const OscillatorParams& p, std::span<const std::complex<double>> x);

/// Exponent (without the leading i) of the anharmonic weight.
std::complex<double> anharmonic_phase(const OscillatorParams& p, std::span<const std::complex<double>> x);

/// s_k = (2 mu / delta) [1 - cos(omega_k)] - kappa delta.
double harmonic_sk(const OscillatorParams& p, int k, OmegaConvention conv = OmegaConvention::two_pi_k_over_T);
std::complex<double> harmonic_sk(std::complex<double> mu, double kappa, double delta, int T, int k,
                                 OmegaConvention conv = OmegaConvention::two_pi_k_over_T);

/// Real mass that makes Re s_k vanish: kappa delta^2 / (2 (1 - cos omega_k)).
double resonant_mu(int k, double kappa, double delta, int T,
                   OmegaConvention conv = OmegaConvention::two_pi_k_over_T);

} // namespace posrep
