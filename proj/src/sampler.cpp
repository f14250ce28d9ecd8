#include "posrep/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "posrep/error.hpp"

namespace posrep {

namespace {

constexpr std::size_t kKnots = std::size_t{1} << 14;
constexpr double kTailMass = 1e-12;
constexpr long kMaxProposals = 1000000;
constexpr double kMinAcceptance = 1e-3;
constexpr std::size_t kBlock = 4096;

RadialSampler::Factor make_factor(const RadialModel1D& model) {
    using Factor = RadialSampler::Factor;
    const auto& v = model.variant();
    if (auto* s = std::get_if<Shifted>(&v)) {
        auto f = make_factor(*s->base);
        f.shift += s->a;
        return f;
    }
    Factor f;
    if (auto* d = std::get_if<DeltaAtB>(&v)) {
        f.kind = Factor::Kind::point;
        f.x = {d->B};
        return f;
    }
    if (auto* dm = std::get_if<DiscreteMeasure>(&v)) {
        f.kind = Factor::Kind::discrete;
        f.x = dm->nodes;
        double c = 0.0;
        for (double w : dm->weights)
            f.cdf.push_back(c += w);
        f.cdf.back() = 1.0;
        return f;
    }

    // Absolutely continuous: tabulate the CDF on a uniform grid.
    f.kind = Factor::Kind::table;
    const double mass = model.normalization();
    auto cell = [&](double a, double b) {
        return boost::math::quadrature::gauss<double, 15>::integrate([&](double r) { return model.density(r); }, a, b);
    };
    // extend the support until what lies beyond is negligible
    double hi = 1.0;
    for (int it = 0;; ++it) {
        double inside = 0.0;
        const int pieces = 256;
        for (int k = 0; k < pieces; ++k)
            inside += cell(hi * k / pieces, hi * (k + 1) / pieces);
        if (inside >= mass * (1.0 - 0.1 * kTailMass))
            break;
        hi *= 1.5;
        if (it > 200)
            throw NumericError("radial sampler: density support does not terminate");
    }
    f.x.resize(kKnots);
    f.cdf.resize(kKnots);
    const double h = hi / static_cast<double>(kKnots - 1);
    double c = 0.0;
    for (std::size_t i = 0; i < kKnots; ++i) {
        f.x[i] = h * static_cast<double>(i);
        if (i)
            c += cell(f.x[i - 1], f.x[i]);
        f.cdf[i] = c;
    }
    for (double& v2 : f.cdf)
        v2 /= c;
    auto end = std::upper_bound(f.cdf.begin(), f.cdf.end(), 1.0 - kTailMass);
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(end - f.cdf.begin()) + 1, kKnots);
    f.x.resize(keep);
    f.cdf.resize(keep);
    f.cdf.back() = 1.0;
    return f;
}

} // namespace

double RadialSampler::Factor::draw(SampleStream& rng) const {
    switch (kind) {
    case Kind::point:
        return x[0] + shift;
    case Kind::discrete: {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), x.size() - 1);
        return x[i] + shift;
    }
    case Kind::table: {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        if (i == 0)
            return x[0] + shift;
        if (i >= cdf.size())
            return x.back() + shift;
        // piecewise-linear CDF between knots
        const double w = (u - cdf[i - 1]) / (cdf[i] - cdf[i - 1]);
        return x[i - 1] + w * (x[i] - x[i - 1]) + shift;
    }
    }
    return 0.0;
}

RadialSampler::RadialSampler(const RadialMomentModel& model, double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("RadialSampler: lambda must be positive");
    for (const auto& f : model.factors())
        factors_.push_back(make_factor(f));
}

void RadialSampler::draw(SampleStream& rng, double* r) const {
    for (std::size_t j = 0; j < factors_.size(); ++j)
        r[j] = lambda_ * factors_[j].draw(rng);
}

AngularSampler::AngularSampler(const AngularSeries& series) : series_(series), envelope_(series.envelope()) {
    auto cert = certify_positivity(series_);
    if (!cert.positive)
        throw CheckError(fmt::format("angular sampler: s_lambda reaches {} on the certificate grid", cert.grid_min));
    if (1.0 / envelope_ < kMinAcceptance)
        throw NumericError(fmt::format("angular sampler: envelope {} gives acceptance below {}", envelope_,
                                       kMinAcceptance));
}

long AngularSampler::draw(SampleStream& rng, double* theta) const {
    const int N = series_.dimension();
    std::span<const double> th(theta, static_cast<std::size_t>(N));
    for (long tries = 1; tries <= kMaxProposals; ++tries) {
        for (int j = 0; j < N; ++j)
            theta[j] = 2.0 * std::numbers::pi * rng.uniform();
        const double u = rng.uniform();
        if (u * envelope_ < series_.evaluate(th))
            return tries;
    }
    throw NumericError("angular sampler: proposal budget exhausted");
}

std::vector<double> sample_radial(const RadialMomentModel& model, double lambda, SampleStream& rng) {
    RadialSampler s(model, lambda);
    std::vector<double> r(static_cast<std::size_t>(model.dimension()));
    s.draw(rng, r.data());
    return r;
}

std::vector<double> sample_angles(const AngularSeries& series, SampleStream& rng) {
    AngularSampler s(series);
    std::vector<double> th(static_cast<std::size_t>(series.dimension()));
    s.draw(rng, th.data());
    return th;
}

ComplexEnsemble ComplexEnsemble::from_points(int dimension, const std::vector<cplx>& z) {
    if (dimension < 1 || z.size() % static_cast<std::size_t>(dimension))
        throw std::invalid_argument("ComplexEnsemble: point count is not a multiple of the dimension");
    ComplexEnsemble e;
    e.dimension = dimension;
    e.count = z.size() / static_cast<std::size_t>(dimension);
    e.z = z;
    for (auto v : z) {
        e.r.push_back(std::abs(v));
        double th = std::arg(v);
        e.theta.push_back(th < 0.0 ? th + 2.0 * std::numbers::pi : th);
    }
    e.proposals = static_cast<long>(z.size());
    return e;
}

ComplexEnsemble sample_ensemble(const TDensity& t, std::size_t n, std::uint64_t seed, Exec exec) {
    const int N = t.dimension();
    const auto Ns = static_cast<std::size_t>(N);
    ComplexEnsemble e;
    e.dimension = N;
    e.seed = seed;
    e.count = n;
    if (n == 0)
        return e;
    RadialSampler radial(t.radial, t.lambda());
    AngularSampler angular(t.angular);
    e.r.resize(n * Ns);
    e.theta.resize(n * Ns);
    e.z.resize(n * Ns);

    auto one = [&](std::size_t i) {
        SampleStream rng(seed, i);
        double* r = e.r.data() + i * Ns;
        double* th = e.theta.data() + i * Ns;
        radial.draw(rng, r);
        long tries = 0;
        // one angle vector per sample; counted per coordinate for the rate
        tries = angular.draw(rng, th);
        for (std::size_t j = 0; j < Ns; ++j)
            e.z[i * Ns + j] = std::polar(r[j], th[j]);
        return tries * N;
    };

    long proposals = 0;
    std::string failure;
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i)
            proposals += one(i);
    } else {
        const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static) reduction(+ : proposals)
        for (long i = 0; i < nn; ++i) {
            try {
                proposals += one(static_cast<std::size_t>(i));
            } catch (const std::exception& ex) {
#pragma omp critical
                if (failure.empty())
                    failure = ex.what();
            }
        }
        if (!failure.empty())
            throw NumericError(failure);
    }
    e.proposals = proposals;
    if (e.acceptance_rate() < kMinAcceptance)
        throw NumericError(fmt::format("sampler acceptance rate {} below {}", e.acceptance_rate(), kMinAcceptance));
    return e;
}

namespace {

cplx monomial(const cplx* z, const MultiIndex& m) {
    cplx v = 1.0;
    for (int j = 0; j < m.dimension(); ++j)
        for (int k = 0; k < m[j]; ++k)
            v *= z[j];
    return v;
}

// Fixed-size blocks reduced in index order keep sums independent of the
// thread count.
template <class F>
std::pair<double, double> blocked_sum(std::size_t n, Exec exec, F&& f) {
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> re(nb, 0.0), im(nb, 0.0);
    auto block = [&](std::size_t b) {
        double sr = 0.0, si = 0.0;
        const std::size_t hi = std::min(n, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < hi; ++i) {
            auto [a, c] = f(i);
            sr += a;
            si += c;
        }
        re[b] = sr;
        im[b] = si;
    };
    if (exec == Exec::serial) {
        for (std::size_t b = 0; b < nb; ++b)
            block(b);
    } else {
        const long nbl = static_cast<long>(nb);
#pragma omp parallel for schedule(static)
        for (long b = 0; b < nbl; ++b)
            block(static_cast<std::size_t>(b));
    }
    double sr = 0.0, si = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        sr += re[b];
        si += im[b];
    }
    return {sr, si};
}

} // namespace

MomentEstimate estimate_moment(const ComplexEnsemble& e, const MultiIndex& m, Exec exec) {
    if (e.count == 0)
        throw std::invalid_argument("estimate_moment: empty ensemble");
    if (m.dimension() != e.dimension)
        throw std::invalid_argument("estimate_moment: dimension mismatch");
    const auto Ns = static_cast<std::size_t>(e.dimension);
    const double n = static_cast<double>(e.count);
    auto [sr, si] = blocked_sum(e.count, exec, [&](std::size_t i) {
        cplx v = monomial(e.z.data() + i * Ns, m);
        return std::pair{v.real(), v.imag()};
    });
    const double mr = sr / n, mi = si / n;
    auto [vr, vi] = blocked_sum(e.count, exec, [&](std::size_t i) {
        cplx v = monomial(e.z.data() + i * Ns, m);
        return std::pair{(v.real() - mr) * (v.real() - mr), (v.imag() - mi) * (v.imag() - mi)};
    });
    MomentEstimate est;
    est.value = cplx(mr, mi);
    est.count = e.count;
    if (e.count > 1) {
        est.se_re = std::sqrt(vr / (n - 1.0) / n);
        est.se_im = std::sqrt(vi / (n - 1.0) / n);
    }
    return est;
}

namespace {

double pull(double diff, double se) {
    if (se > 0.0)
        return std::abs(diff) / se;
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace

VerifyReport verify_moments(const ComplexEnsemble& e, const ComplexMomentTable& table, int D, double nsigma,
                            Exec exec) {
    if (D > table.cutoff())
        throw std::invalid_argument("verify_moments: cutoff exceeds table");
    if (table.dimension() != e.dimension)
        throw std::invalid_argument("verify_moments: dimension mismatch");
    VerifyReport rep;
    rep.nsigma = nsigma;
    for (const auto& m : multi_indices_up_to(e.dimension, D)) {
        PullRow row{m, table.at(m), estimate_moment(e, m, exec)};
        const cplx diff = row.estimate.value - row.reference;
        // Components with (near) zero variance compare against rounding, which
        // scales with the complex magnitude rather than the component.
        const double floor = 1e-12 * std::max(std::abs(row.reference), std::abs(row.estimate.value));
        const double tol_re = std::max(row.estimate.se_re, floor);
        const double tol_im = std::max(row.estimate.se_im, floor);
        row.pull_re = pull(diff.real(), tol_re);
        row.pull_im = pull(diff.imag(), tol_im);
        row.pass = row.pull_re <= nsigma && row.pull_im <= nsigma;
        const double worst = std::max(row.pull_re, row.pull_im);
        if (!rep.worst || worst > rep.worst_pull) {
            rep.worst = m;
            rep.worst_pull = worst;
        }
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

void write_ensemble_csv(const ComplexEnsemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    const auto Ns = static_cast<std::size_t>(e.dimension);
    for (std::size_t j = 1; j <= Ns; ++j)
        out << (j > 1 ? "," : "") << "r_" << j << ",theta_" << j;
    for (std::size_t j = 1; j <= Ns; ++j)
        out << ",re_z_" << j << ",im_z_" << j;
    out << '\n';
    fmt::memory_buffer buf;
    for (std::size_t i = 0; i < e.count; ++i) {
        buf.clear();
        for (std::size_t j = 0; j < Ns; ++j)
            fmt::format_to(std::back_inserter(buf), "{}{:.17g},{:.17g}", j ? "," : "", e.r[i * Ns + j],
                           e.theta[i * Ns + j]);
        for (std::size_t j = 0; j < Ns; ++j)
            fmt::format_to(std::back_inserter(buf), ",{:.17g},{:.17g}", e.z[i * Ns + j].real(), e.z[i * Ns + j].imag());
        buf.push_back('\n');
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

} // namespace posrep
