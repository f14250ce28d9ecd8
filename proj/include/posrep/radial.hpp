#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "posrep/multi_index.hpp"
#include "posrep/weights.hpp"

namespace posrep {

/// Unnormalized density on [0, inf); moments by adaptive quadrature.
struct ExplicitDensity {
    std::string name;
    std::function<double(double)> density;
};

/// Point mass at B > 0.
struct DeltaAtB {
    double B = 1.0;
};

/// Kinetic coefficient of the anharmonic dominating density: sqrt(2) mu/delta
/// follows from the rotated-contour bound; sqrt(2)/(mu delta) is the printed
/// variant.
enum class KineticForm { derived, literal };

/// p(r) = exp(c r^2 - kappa delta r^4) evaluated at r / scale.
struct AnharmonicDensity {
    double mu = 1.0;
    double kappa = 1.0;
    double delta = 1.0;
    KineticForm form = KineticForm::derived;
    double scale = 1.0;

    double quadratic_coefficient() const;
    double quartic_coefficient() const { return kappa * delta; }
};

class RadialModel1D;

/// Base density translated right by a > 0, zero below a.
struct Shifted {
    std::shared_ptr<const RadialModel1D> base;
    double a = 0.0;
};

/// Finite measure sum_i w_i delta(r - r_i); weights normalized on construction.
struct DiscreteMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;
};

class RadialModel1D {
  public:
    using Variant = std::variant<ExplicitDensity, DeltaAtB, AnharmonicDensity, Shifted, DiscreteMeasure>;

    explicit RadialModel1D(Variant v);

    static RadialModel1D half_gaussian();
    static RadialModel1D exponential();
    static RadialModel1D explicit_density(std::string name, std::function<double(double)> density);
    static RadialModel1D delta(double B) { return RadialModel1D(DeltaAtB{B}); }
    static RadialModel1D anharmonic(double mu, double kappa, double delta, KineticForm form = KineticForm::derived,
                                    double scale = 1.0) {
        return RadialModel1D(AnharmonicDensity{mu, kappa, delta, form, scale});
    }
    static RadialModel1D discrete(std::vector<double> nodes, std::vector<double> weights) {
        return RadialModel1D(DiscreteMeasure{std::move(nodes), std::move(weights)});
    }

    const Variant& variant() const { return v_; }
    std::string describe() const;

    /// Normalized moment <r^m>.
    double moment(int m) const;
    /// <r^0> .. <r^mmax>.
    std::vector<double> moments(int mmax) const;

    /// Total mass of the unnormalized weight (1 for point masses and
    /// discrete measures).
    double normalization() const;

    /// Whether the model is an absolutely continuous density.
    bool has_density() const;
    /// Unnormalized density at r.
    double density(double r) const;

  private:
    struct Cache;

    double compute_moment(int m) const;

    Variant v_;
    std::shared_ptr<Cache> cache_;
};

/// Product p(r_1) ... p(r_N) of one-dimensional models.
class RadialMomentModel {
  public:
    explicit RadialMomentModel(std::vector<RadialModel1D> factors);
    static RadialMomentModel iid(const RadialModel1D& factor, int N);

    int dimension() const { return static_cast<int>(factors_.size()); }
    const RadialModel1D& factor(int j) const { return factors_.at(static_cast<std::size_t>(j)); }
    const std::vector<RadialModel1D>& factors() const { return factors_; }
    std::string describe() const;

  private:
    std::vector<RadialModel1D> factors_;
};

/// <r_1^{m_1} ... r_N^{m_N}>_p.
double radial_moment(const RadialMomentModel& model, const MultiIndex& m);

struct DominanceReport {
    bool pass = true;
    std::optional<MultiIndex> first_failure;
    /// min over nonzero m of <r^m>_p - |<x^m>_c| (0 when D = 0)
    double margin = 0.0;
    int cutoff = 0;
};

/// |<x^m>_c| <= <r^m>_p for every multi-index of degree <= D.
DominanceReport dominance_check(const ComplexMomentTable& table, const RadialMomentModel& model, int D);

/// Translate a one-dimensional model by a > 0.
RadialModel1D shift_model(const RadialModel1D& model, double a);

struct GrowthReport {
    /// inf over m <= mmax of <r^m> / R^m
    double b_R = 0.0;
    int argmin = 0;
    /// the infimum sits at mmax: ratios still falling, growth bound fails for R
    bool decaying = false;
};

GrowthReport growth_check(const RadialModel1D& model, double R, int mmax);

} // namespace posrep
