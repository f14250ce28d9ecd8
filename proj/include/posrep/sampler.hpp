#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posrep/exec.hpp"
#include "posrep/rng.hpp"
#include "posrep/tconstruct.hpp"

namespace posrep {

/// Draws r_j ~ p_j(r / lambda) for each factor of a product model.
class RadialSampler {
  public:
    /// Density factors use an inverse-CDF table with 2^14 knots, truncated
    /// where the cumulative mass exceeds 1 - 1e-12.
    RadialSampler(const RadialMomentModel& model, double lambda);

    int dimension() const { return static_cast<int>(factors_.size()); }
    double lambda() const { return lambda_; }
    void draw(SampleStream& rng, double* r) const;

    struct Factor {
        enum class Kind { point, discrete, table } kind = Kind::point;
        double shift = 0.0;
        std::vector<double> x; // point: {B}; discrete: nodes; table: knots
        std::vector<double> cdf;
        double draw(SampleStream& rng) const;
    };

  private:
    std::vector<Factor> factors_;
    double lambda_;
};

/// theta ~ s_lambda on [0, 2pi)^N by rejection against the uniform torus.
class AngularSampler {
  public:
    /// Checks the positivity certificate and the envelope before accepting
    /// the series.
    explicit AngularSampler(const AngularSeries& series);

    double envelope() const { return envelope_; }
    /// Returns the number of proposals used.
    long draw(SampleStream& rng, double* theta) const;

  private:
    AngularSeries series_;
    double envelope_;
};

/// Single draws, mainly for tests: radial components scaled by lambda.
std::vector<double> sample_radial(const RadialMomentModel& model, double lambda, SampleStream& rng);
std::vector<double> sample_angles(const AngularSeries& series, SampleStream& rng);

struct ComplexEnsemble {
    int dimension = 1;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    /// row-major, count x dimension
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<cplx> z;
    long proposals = 0;

    double acceptance_rate() const {
        return proposals > 0 ? static_cast<double>(count) * dimension / static_cast<double>(proposals) : 1.0;
    }
    /// Ensemble of given points (r, theta derived from z).
    static ComplexEnsemble from_points(int dimension, const std::vector<cplx>& z);
};

/// n i.i.d. draws from t; sample i uses SampleStream(seed, i).
ComplexEnsemble sample_ensemble(const TDensity& t, std::size_t n, std::uint64_t seed, Exec exec = Exec::parallel);

struct MomentEstimate {
    cplx value;
    double se_re = 0.0;
    double se_im = 0.0;
    std::size_t count = 0;
};

MomentEstimate estimate_moment(const ComplexEnsemble& e, const MultiIndex& m, Exec exec = Exec::parallel);

struct PullRow {
    MultiIndex index;
    cplx reference;
    MomentEstimate estimate;
    double pull_re = 0.0;
    double pull_im = 0.0;
    bool pass = true;
};

struct VerifyReport {
    bool pass = true;
    std::optional<MultiIndex> worst;
    double worst_pull = 0.0;
    double nsigma = 0.0;
    std::vector<PullRow> rows;
};

/// |estimate - reference| / std_error <= nsigma, per real and imaginary part,
/// for every multi-index of degree <= D.
VerifyReport verify_moments(const ComplexEnsemble& e, const ComplexMomentTable& table, int D, double nsigma,
                            Exec exec = Exec::parallel);

/// Columns r_1, theta_1, ..., r_N, theta_N, re_z_1, im_z_1, ..., re_z_N, im_z_N.
void write_ensemble_csv(const ComplexEnsemble& e, const std::string& path);

} // namespace posrep
