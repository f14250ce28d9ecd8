#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posrep/exec.hpp"
#include "posrep/oscillator.hpp"
#include "posrep/radial.hpp"
#include "posrep/weights.hpp"

namespace posrep {

struct AnharmonicBound {
    /// product of T anharmonic densities at scale lambda_b
    RadialMomentModel model;
    double initial_scale = 1.0;
    double scale = 1.0;
    int escalations = 0;
    /// 1D integral of the unscaled dominating density over [0, inf)
    double z_hat = 0.0;
    double abs_z = 0.0;
    DominanceReport dominance;
};

/// Dominating radial model for the lattice weight. The starting scale is
/// max(1, (2 Z_hat)^T / |Z_c|)^{1/T}; it is multiplied by 1.5 until every
/// moment of degree <= D is dominated, at most max_escalations times.
AnharmonicBound anharmonic_bound(const OscillatorParams& params, const ComplexMomentTable& table, int D,
                                 KineticForm form = KineticForm::derived, int max_escalations = 40);

/// <x^m>_c of the lattice weight by rotated-contour quadrature (T <= 3).
cplx direct_lattice_moment(const OscillatorParams& params, const MultiIndex& m, double tol = 1e-9,
                           std::optional<double> angle = std::nullopt);

enum class ModeRotation { plus, minus, resonant };

std::string to_string(ModeRotation r);

/// One real Fourier coordinate of the harmonic lattice: a_k (k = 0..M) or
/// b_k (k = 1..M), with weight exp(i s x^2).
struct HarmonicMode {
    int k = 0;
    bool sine = false;
    cplx s;
    ModeRotation rotation = ModeRotation::plus;
    /// contour angle making exp(i s x^2) a real Gaussian
    double phase = 0.0;
    /// variance of the Gaussian along the rotated contour
    double variance = 0.0;
};

/// Modes in coordinate order a_0, a_1..a_M, b_1..b_M. A mode is resonant
/// when |Re s| is below 1e-10 of the scale of its terms.
std::vector<HarmonicMode> harmonic_modes(const OscillatorParams& params, double epsilon,
                                         OmegaConvention conv = OmegaConvention::two_pi_k_over_T);

int resonant_count(const std::vector<HarmonicMode>& modes);

struct TrajectoryEnsemble {
    int T = 1;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::vector<HarmonicMode> modes;
    /// count x T, mode coordinates in harmonic_modes order
    std::vector<cplx> coefficients;
    /// count x T, x_1 .. x_T
    std::vector<cplx> trajectories;
};

TrajectoryEnsemble harmonic_ensemble(const OscillatorParams& params, double epsilon, std::size_t n,
                                     std::uint64_t seed,
                                     OmegaConvention conv = OmegaConvention::two_pi_k_over_T,
                                     Exec exec = Exec::parallel);

/// x_t = sum_{k=0..M} [a_k cos(2 pi k t/T) + b_k sin(2 pi k t/T)], t = 1..T,
/// T = 2M + 1; coefficients ordered a_0..a_M, b_1..b_M.
std::vector<cplx> fourier_synthesis(std::span<const cplx> coefficients);
std::vector<cplx> fourier_analysis(std::span<const cplx> trajectory);

/// Mean of |a_k|^2 + |b_k|^2 over the ensemble, k = 0..M (b_0 = 0).
std::vector<double> real_power_spectrum(const TrajectoryEnsemble& e);

/// Root-mean-square amplitude of mode k over the ensemble.
double mode_amplitude(const TrajectoryEnsemble& e, int k);

/// Columns sample, t, re, im.
void write_trajectories_csv(const TrajectoryEnsemble& e, const std::string& path);

} // namespace posrep
