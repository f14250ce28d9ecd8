#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "posrep/multi_index.hpp"
#include "posrep/oscillator.hpp"

namespace posrep {

using cplx = std::complex<double>;

enum class Provenance { analytic, quadrature, symmetry, tabulated };

std::string to_string(Provenance p);

struct MomentEntry {
    cplx value;
    Provenance provenance = Provenance::analytic;
};

/// Normalized moments <x^m>_c for every multi-index of degree <= cutoff.
class ComplexMomentTable {
  public:
    ComplexMomentTable(int dimension, int cutoff, std::map<MultiIndex, MomentEntry> entries,
                       std::optional<double> abs_normalization = std::nullopt);

    int dimension() const { return dimension_; }
    int cutoff() const { return cutoff_; }
    /// |Z_c|, when the weight was integrated here.
    std::optional<double> abs_normalization() const { return abs_norm_; }

    cplx at(const MultiIndex& m) const;
    const MomentEntry& entry(const MultiIndex& m) const;
    const std::map<MultiIndex, MomentEntry>& entries() const { return entries_; }

    ComplexMomentTable truncated(int D) const;
    /// Copy with one entry replaced (provenance becomes tabulated).
    ComplexMomentTable with_entry(const MultiIndex& m, cplx value) const;

  private:
    int dimension_;
    int cutoff_;
    std::map<MultiIndex, MomentEntry> entries_;
    std::optional<double> abs_norm_;
};

/// exp(i sum_j a_j x_j^2), a_j real and nonzero.
struct GaussianPhase {
    std::vector<double> a;
};

/// exp(-i sum_j g_j x_j^4), g_j > 0.
struct QuarticPhase {
    std::vector<double> g;
};

/// Periodic anharmonic lattice oscillator, one coordinate per time slice.
struct AnharmonicLattice {
    OscillatorParams params;
};

/// Harmonic oscillator in Fourier coordinates (a_0..a_M, b_1..b_M) with the
/// mass shifted to mu + i epsilon.
struct HarmonicFourier {
    OscillatorParams params;
    double epsilon = 0.0;
    OmegaConvention convention = OmegaConvention::two_pi_k_over_T;
};

struct Tabulated {
    std::shared_ptr<const ComplexMomentTable> table;
};

class ComplexWeightSpec {
  public:
    using Variant = std::variant<GaussianPhase, QuarticPhase, AnharmonicLattice, HarmonicFourier, Tabulated>;

    explicit ComplexWeightSpec(Variant v);

    static ComplexWeightSpec gaussian_phase(std::vector<double> a) { return ComplexWeightSpec(GaussianPhase{std::move(a)}); }
    static ComplexWeightSpec quartic_phase(std::vector<double> g) { return ComplexWeightSpec(QuarticPhase{std::move(g)}); }
    static ComplexWeightSpec anharmonic_lattice(const OscillatorParams& p) { return ComplexWeightSpec(AnharmonicLattice{p}); }
    static ComplexWeightSpec harmonic_fourier(const OscillatorParams& p, double epsilon,
                                              OmegaConvention conv = OmegaConvention::two_pi_k_over_T) {
        return ComplexWeightSpec(HarmonicFourier{p, epsilon, conv});
    }
    static ComplexWeightSpec tabulated(ComplexMomentTable table) {
        return ComplexWeightSpec(Tabulated{std::make_shared<const ComplexMomentTable>(std::move(table))});
    }

    const Variant& variant() const { return v_; }
    int dimension() const;
    std::string kind() const;
    bool is_tabulated() const { return std::holds_alternative<Tabulated>(v_); }
    /// c factorizes into one-coordinate weights.
    bool separable() const;

    /// log c(x) at complex coordinates; not available for Tabulated.
    cplx log_weight(std::span<const cplx> x) const;
    /// Per-coordinate quadratic coefficient s such that c = prod exp(i s x^2)
    /// (GaussianPhase, HarmonicFourier only).
    cplx quadratic_coefficient(int j) const;
    /// Contour angle used when the caller does not fix one.
    double default_rotation(int j) const;

  private:
    Variant v_;
};

/// <x^m> for the weight exp(i a x^2): 0 for odd m, (2k-1)!!/(2(-ia))^k for m = 2k.
/// Complex a requires Im a >= 0 (convergent or oscillatory integral).
cplx gaussian_moment(cplx a, int m);
inline cplx gaussian_moment(double a, int m) { return gaussian_moment(cplx(a, 0.0), m); }

struct QuadratureOptions {
    /// Same contour angle for all coordinates; per-variant default otherwise.
    std::optional<double> rotation_angle;
    /// Relative tolerance; defaults to 1e-9 in 1D and 1e-7 above.
    std::optional<double> tol;
    /// Minimum |Z_c| relative to the integral of |c| along the contour.
    double z_floor = 1e-12;
    unsigned max_depth = 18;
};

struct OscillatoryResult {
    cplx value;
    double abs_normalization = 0.0;
    double error_estimate = 0.0;
};

using Observable = std::function<cplx(std::span<const cplx>)>;

/// <f>_c on the rotated contour x_j = exp(i phi_j) y_j. Nested adaptive
/// Gauss-Kronrod, N <= 3.
OscillatoryResult oscillatory_expectation(const ComplexWeightSpec& spec, const Observable& f,
                                          const QuadratureOptions& opts = {});

/// <x^m>_c by rotated-contour quadrature. Separable weights reduce to
/// products of one-dimensional integrals and are not limited to N <= 3.
OscillatoryResult oscillatory_moment(const ComplexWeightSpec& spec, const MultiIndex& m,
                                     const QuadratureOptions& opts = {});

/// Every moment of degree <= D; odd entries forced by reflection symmetry
/// are exactly zero.
ComplexMomentTable build_moment_table(const ComplexWeightSpec& spec, int D, const QuadratureOptions& opts = {});

/// CSV with header "index,re,im"; index in colon form.
ComplexMomentTable read_moment_table_csv(const std::string& path);

} // namespace posrep
