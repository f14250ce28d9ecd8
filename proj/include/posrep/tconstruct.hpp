#pragma once

#include <complex>
#include <span>
#include <vector>

#include "posrep/exec.hpp"
#include "posrep/multi_index.hpp"
#include "posrep/radial.hpp"
#include "posrep/weights.hpp"

namespace posrep {

/// Smallest lambda for which 3 - 2 (lambda/(lambda-1))^N >= 0, i.e.
/// 1 / (1 - (2/3)^{1/N}); exactly 3 for N = 1.
double lambda_min(int N);

/// Guaranteed lower bound on s_lambda: 3 - 2 (lambda/(lambda-1))^N.
double s_lower_bound(double lambda, int N);
/// Upper bound on s_lambda: 2 (lambda/(lambda-1))^N - 1.
double s_upper_envelope(double lambda, int N);

/// 2 sum_{d > D} count(N, d) lambda^{-d}: sup-norm bound on what the
/// angular series drops when truncated at degree D.
double tail_bound(double lambda, int N, int D);

/// Smallest D with tail_bound < fraction * s_lower_bound.
int adaptive_cutoff(double lambda, int N, double fraction = 0.25);

struct LambdaChoice {
    double lambda = 0.0;
    int dimension = 1;
    double margin_factor = 1.0;

    /// lambda = margin * lambda_min(N).
    static LambdaChoice with_margin(int N, double margin = 1.05);
    /// Explicit lambda; must satisfy lambda >= margin * lambda_min(N).
    static LambdaChoice fixed(int N, double lambda, double margin = 1.0);
    void validate() const;
};

/// Truncated Fourier data of q_lambda: gamma_m = <x^m>_c / (lambda^|m| <r^m>_p)
/// for every m with |m| <= D. s_lambda(theta) = 1 + 2 Re sum_{m != 0}
/// gamma_m exp(-i m.theta).
class AngularSeries {
  public:
    AngularSeries(int N, int D, double lambda, std::vector<MultiIndex> indices, std::vector<cplx> gamma);

    int dimension() const { return N_; }
    int cutoff() const { return D_; }
    double lambda() const { return lambda_; }
    std::size_t size() const { return gamma_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const std::vector<cplx>& coefficients() const { return gamma_; }
    cplx coefficient(const MultiIndex& m) const;

    /// s_lambda at theta without the invariant check.
    double evaluate(std::span<const double> theta) const;
    double tail() const { return tail_bound(lambda_, N_, D_); }
    /// 1 + 2 sum_{m != 0} |gamma_m|, a pointwise bound on s.
    double envelope() const;

  private:
    int N_;
    int D_;
    double lambda_;
    std::vector<MultiIndex> indices_;
    std::vector<cplx> gamma_;
    std::vector<int> exps_; // row-major copy of nonzero indices
    std::vector<cplx> nz_gamma_;
};

/// Requires dominance up to D; refuses otherwise.
AngularSeries build_angular(const ComplexMomentTable& table, const RadialMomentModel& model,
                            const LambdaChoice& lambda, int D);

/// s_lambda(theta); NumericError if the value falls below -tail.
double s_eval(const AngularSeries& series, std::span<const double> theta);

/// f_lambda(y) = sum_m y^m / (lambda^m <r^m>), summed until the remainder is
/// certified below 1e-12. Moment ratios of a measure on [0, inf) are
/// nondecreasing, so term ratios are nonincreasing and the geometric bound
/// on the remainder is rigorous.
cplx f_lambda(const RadialModel1D& model, double lambda, cplx y);

/// t_lambda(z) = prod_j r_j^{-1} p_j(r_j / lambda) s_lambda(theta) / Z.
struct TDensity {
    RadialMomentModel radial;
    AngularSeries angular;
    /// (2 pi)^N lambda^N prod_j Z_{p_j}
    double normalization = 1.0;

    double lambda() const { return angular.lambda(); }
    int dimension() const { return angular.dimension(); }
    /// Normalized density at z (models with densities only).
    double density(std::span<const cplx> z) const;
};

TDensity construct_t(const ComplexMomentTable& table, const RadialMomentModel& model, const LambdaChoice& lambda,
                     int D);

/// <z^m>_t integrated analytically: lambda^|m| <r^m>_p gamma_m.
cplx t_moment_roundtrip(const TDensity& t, const MultiIndex& m);

struct PositivityCertificate {
    double lower_bound = 0.0;
    double tail = 0.0;
    double grid_min = 0.0;
    double grid_max = 0.0;
    double upper_envelope = 0.0;
    long grid_points = 0;
    /// grid_min >= lower_bound - tail
    bool certified = false;
    /// grid_min > 0
    bool positive = false;
};

/// Scan s_lambda on a uniform torus grid of about target_points points.
PositivityCertificate certify_positivity(const AngularSeries& series, long target_points = 10000,
                                         Exec exec = Exec::parallel);

} // namespace posrep
