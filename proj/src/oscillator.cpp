#include "posrep/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace posrep {

void OscillatorParams::validate() const {
    if (!(mu > 0.0) || !(kappa > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("OscillatorParams: mu, kappa, delta must be positive");
    if (T < 1)
        throw std::invalid_argument("OscillatorParams: T must be >= 1");
}

double mode_frequency(int k, int T, OmegaConvention conv) {
    if (conv == OmegaConvention::literal_k)
        return static_cast<double>(k);
    return 2.0 * std::numbers::pi * k / T;
}

std::complex<double> anharmonic_phase(const OscillatorParams& p, std::span<const std::complex<double>> x) {
    if (static_cast<int>(x.size()) != p.T)
        throw std::invalid_argument("anharmonic weight: expected " + std::to_string(p.T) + " coordinates");
    std::complex<double> kin = 0.0, quart = 0.0;
    const std::size_t T = x.size();
    for (std::size_t t = 0; t < T; ++t) {
        auto d = x[t] - x[(t + 1) % T];
        kin += d * d;
        auto x2 = x[t] * x[t];
        quart += x2 * x2;
    }
    return p.mu * kin / (2.0 * p.delta) - p.kappa * p.delta * quart;
}

std::complex<double> anharmonic_weight(const OscillatorParams& p, std::span<const std::complex<double>> x) {
    return std::exp(std::complex<double>(0.0, 1.0) * anharmonic_phase(p, x));
}

std::complex<double> anharmonic_weight(const OscillatorParams& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.T)
        throw std::invalid_argument("anharmonic weight: expected " + std::to_string(p.T) + " coordinates");
    double phase = 0.0;
    const std::size_t T = x.size();
    for (std::size_t t = 0; t < T; ++t) {
        double d = x[t] - x[(t + 1) % T];
        double x2 = x[t] * x[t];
        phase += p.mu * d * d / (2.0 * p.delta) - p.kappa * x2 * x2 * p.delta;
    }
    return std::polar(1.0, phase);
}

std::complex<double> harmonic_sk(std::complex<double> mu, double kappa, double delta, int T, int k,
                                 OmegaConvention conv) {
    if (k < 0 || k > (T - 1) / 2)
        throw std::invalid_argument("harmonic_sk: mode index out of range");
    return 2.0 * mu / delta * (1.0 - std::cos(mode_frequency(k, T, conv))) - kappa * delta;
}

double harmonic_sk(const OscillatorParams& p, int k, OmegaConvention conv) {
    return harmonic_sk(std::complex<double>(p.mu, 0.0), p.kappa, p.delta, p.T, k, conv).real();
}

double resonant_mu(int k, double kappa, double delta, int T, OmegaConvention conv) {
    double gap = 1.0 - std::cos(mode_frequency(k, T, conv));
    if (!(gap > 1e-14))
        throw std::invalid_argument("resonant_mu: mode " + std::to_string(k) +
                                    " has cos(omega_k) = 1; no mass makes it resonant");
    return kappa * delta * delta / (2.0 * gap);
}

} // namespace posrep
