#include "posrep/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "posrep/error.hpp"

namespace posrep {

namespace {

constexpr cplx I{0.0, 1.0};

// Integrand decay threshold used to cut the rotated contour: e-folds below
// the envelope peak.
constexpr double kCutoffEfolds = 60.0;

} // namespace

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::quadrature: return "quadrature";
    case Provenance::symmetry: return "symmetry";
    case Provenance::tabulated: return "tabulated";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ComplexMomentTable

ComplexMomentTable::ComplexMomentTable(int dimension, int cutoff, std::map<MultiIndex, MomentEntry> entries,
                                       std::optional<double> abs_normalization)
    : dimension_(dimension), cutoff_(cutoff), entries_(std::move(entries)), abs_norm_(abs_normalization) {
    if (dimension_ < 1)
        throw std::invalid_argument("ComplexMomentTable: dimension must be >= 1");
    if (cutoff_ < 0)
        throw std::invalid_argument("ComplexMomentTable: cutoff must be >= 0");
    if (abs_norm_ && !(*abs_norm_ > 0.0))
        throw std::invalid_argument("ComplexMomentTable: |Z_c| must be positive");
    for (const auto& m : multi_indices_up_to(dimension_, cutoff_))
        if (!entries_.count(m))
            throw std::invalid_argument("ComplexMomentTable: missing entry " + m.str());
    for (const auto& [m, e] : entries_) {
        if (m.dimension() != dimension_)
            throw std::invalid_argument("ComplexMomentTable: entry " + m.str() + " has wrong dimension");
        if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
            throw std::invalid_argument("ComplexMomentTable: non-finite entry " + m.str());
    }
    if (entries_.at(MultiIndex::zero(dimension_)).value != cplx(1.0, 0.0))
        throw std::invalid_argument("ComplexMomentTable: entry at zero index must be exactly 1");
}

const MomentEntry& ComplexMomentTable::entry(const MultiIndex& m) const {
    auto it = entries_.find(m);
    if (it == entries_.end())
        throw std::out_of_range("ComplexMomentTable: no entry " + m.str());
    return it->second;
}

cplx ComplexMomentTable::at(const MultiIndex& m) const { return entry(m).value; }

ComplexMomentTable ComplexMomentTable::truncated(int D) const {
    if (D > cutoff_)
        throw std::invalid_argument("ComplexMomentTable: requested degree " + std::to_string(D) +
                                    " exceeds cutoff " + std::to_string(cutoff_));
    std::map<MultiIndex, MomentEntry> sub;
    for (const auto& [m, e] : entries_)
        if (m.degree() <= D)
            sub.emplace(m, e);
    return ComplexMomentTable(dimension_, D, std::move(sub), abs_norm_);
}

ComplexMomentTable ComplexMomentTable::with_entry(const MultiIndex& m, cplx value) const {
    auto copy = entries_;
    copy[m] = MomentEntry{value, Provenance::tabulated};
    return ComplexMomentTable(dimension_, std::max(cutoff_, 0), std::move(copy), abs_norm_);
}

// ---------------------------------------------------------------------------
// ComplexWeightSpec

ComplexWeightSpec::ComplexWeightSpec(Variant v) : v_(std::move(v)) {
    std::visit(
        [](const auto& w) {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, GaussianPhase>) {
                if (w.a.empty())
                    throw std::invalid_argument("GaussianPhase: need at least one coefficient");
                for (double a : w.a)
                    if (a == 0.0 || !std::isfinite(a))
                        throw std::invalid_argument("GaussianPhase: coefficients must be finite and nonzero");
            } else if constexpr (std::is_same_v<W, QuarticPhase>) {
                if (w.g.empty())
                    throw std::invalid_argument("QuarticPhase: need at least one coefficient");
                for (double g : w.g)
                    if (!(g > 0.0) || !std::isfinite(g))
                        throw std::invalid_argument("QuarticPhase: coefficients must be positive");
            } else if constexpr (std::is_same_v<W, AnharmonicLattice>) {
                w.params.validate();
            } else if constexpr (std::is_same_v<W, HarmonicFourier>) {
                w.params.validate();
                if (w.params.T % 2 == 0)
                    throw std::invalid_argument("HarmonicFourier: T must be odd (T = 2M + 1)");
                if (w.epsilon < 0.0)
                    throw std::invalid_argument("HarmonicFourier: epsilon must be non-negative");
            } else {
                if (!w.table)
                    throw std::invalid_argument("Tabulated: null table");
            }
        },
        v_);
}

int ComplexWeightSpec::dimension() const {
    return std::visit(
        [](const auto& w) -> int {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, GaussianPhase>)
                return static_cast<int>(w.a.size());
            else if constexpr (std::is_same_v<W, QuarticPhase>)
                return static_cast<int>(w.g.size());
            else if constexpr (std::is_same_v<W, AnharmonicLattice> || std::is_same_v<W, HarmonicFourier>)
                return w.params.T;
            else
                return w.table->dimension();
        },
        v_);
}

std::string ComplexWeightSpec::kind() const {
    static const char* names[] = {"gaussian_phase", "quartic_phase", "anharmonic_lattice", "harmonic_fourier",
                                  "tabulated"};
    return names[v_.index()];
}

bool ComplexWeightSpec::separable() const {
    return std::holds_alternative<GaussianPhase>(v_) || std::holds_alternative<QuarticPhase>(v_) ||
           std::holds_alternative<HarmonicFourier>(v_);
}

cplx ComplexWeightSpec::quadratic_coefficient(int j) const {
    if (auto* g = std::get_if<GaussianPhase>(&v_))
        return g->a.at(static_cast<std::size_t>(j));
    if (auto* h = std::get_if<HarmonicFourier>(&v_)) {
        const int M = (h->params.T - 1) / 2;
        if (j < 0 || j >= h->params.T)
            throw std::out_of_range("HarmonicFourier: coordinate index out of range");
        int k = j <= M ? j : j - M;
        return harmonic_sk(cplx(h->params.mu, h->epsilon), h->params.kappa, h->params.delta, h->params.T, k,
                           h->convention);
    }
    throw std::logic_error("quadratic_coefficient: weight is not Gaussian");
}

cplx ComplexWeightSpec::log_weight(std::span<const cplx> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("log_weight: wrong number of coordinates");
    if (auto* q = std::get_if<QuarticPhase>(&v_)) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            auto x2 = x[j] * x[j];
            s += q->g[j] * x2 * x2;
        }
        return -I * s;
    }
    if (auto* l = std::get_if<AnharmonicLattice>(&v_))
        return I * anharmonic_phase(l->params, x);
    if (is_tabulated())
        throw std::logic_error("log_weight: tabulated weights have no closed form");
    cplx s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        s += quadratic_coefficient(static_cast<int>(j)) * x[j] * x[j];
    return I * s;
}

double ComplexWeightSpec::default_rotation(int j) const {
    if (std::holds_alternative<QuarticPhase>(v_) || std::holds_alternative<AnharmonicLattice>(v_))
        return -std::numbers::pi / 8.0;
    if (is_tabulated())
        return 0.0;
    // exp(i s x^2) with x = e^{i phi} y is a real Gaussian when
    // phi = pi/4 - arg(s)/2.
    cplx s = quadratic_coefficient(j);
    return std::numbers::pi / 4.0 - std::arg(s) / 2.0;
}

// ---------------------------------------------------------------------------
// Analytic Gaussian moments

cplx gaussian_moment(cplx a, int m) {
    if (a == cplx(0.0, 0.0))
        throw std::invalid_argument("gaussian_moment: a must be nonzero");
    if (a.imag() < 0.0)
        throw std::invalid_argument("gaussian_moment: Im a must be >= 0");
    if (m < 0)
        throw std::invalid_argument("gaussian_moment: m must be >= 0");
    if (m % 2)
        return 0.0;
    const int k = m / 2;
    // (2k-1)!! / (2(-ia))^k = prod_{j=1..k} (2j-1) / (2(-ia))
    const cplx step = 1.0 / (2.0 * (-I * a));
    cplx v = 1.0;
    for (int j = 1; j <= k; ++j)
        v *= static_cast<double>(2 * j - 1) * step;
    return v;
}

// ---------------------------------------------------------------------------
// Rotated-contour quadrature

namespace {

// Real part of the leading-power coefficient of log c along direction psi,
// and that power.
struct Leading {
    double re;
    int power;
};

Leading leading_term(const ComplexWeightSpec& spec, int j, double psi) {
    const auto& v = spec.variant();
    if (auto* q = std::get_if<QuarticPhase>(&v))
        return {(-I * q->g[static_cast<std::size_t>(j)] * std::exp(4.0 * I * psi)).real(), 4};
    if (auto* l = std::get_if<AnharmonicLattice>(&v))
        return {(-I * l->params.kappa * l->params.delta * std::exp(4.0 * I * psi)).real(), 4};
    return {(I * spec.quadratic_coefficient(j) * std::exp(2.0 * I * psi)).real(), 2};
}

// log|c| along the ray is bounded by sum_j (a2 y_j^2 + a4 y_j^4).
struct Envelope {
    double a2 = 0.0;
    double a4 = 0.0;
};

Envelope envelope(const ComplexWeightSpec& spec, int j, double phi) {
    auto lead = leading_term(spec, j, phi);
    Envelope e;
    (lead.power == 4 ? e.a4 : e.a2) = lead.re;
    if (auto* l = std::get_if<AnharmonicLattice>(&spec.variant()); l && l->params.T > 1) {
        // Kinetic term bounded with (u - v)^2 <= 2 (u^2 + v^2).
        double k = (I * l->params.mu * std::exp(2.0 * I * phi)).real() / (2.0 * l->params.delta);
        e.a2 = 4.0 * std::max(k, 0.0);
    }
    return e;
}

void check_rotation(const ComplexWeightSpec& spec, int j, double phi) {
    auto lead = leading_term(spec, j, phi);
    const double scale = std::abs(leading_term(spec, j, 0.0).re) + 1.0;
    if (!(lead.re < 0.0))
        throw NumericError("rotation angle " + std::to_string(phi) + " gives a non-decaying integrand in coordinate " +
                           std::to_string(j));
    // Cauchy's theorem needs decay throughout the swept sector.
    constexpr int kSteps = 64;
    for (int s = 1; s < kSteps; ++s) {
        double psi = phi * s / kSteps;
        if (leading_term(spec, j, psi).re > 1e-12 * scale)
            throw NumericError("rotation angle " + std::to_string(phi) +
                               " sweeps through a growing sector in coordinate " + std::to_string(j));
    }
}

// Half-width of the integration box: the envelope (with a y^p factor) has
// dropped kCutoffEfolds below its peak.
double half_width(const Envelope& e, int p) {
    auto g = [&](double y) { return e.a2 * y * y + e.a4 * y * y * y * y + (p > 0 ? p * std::log(y) : 0.0); };
    double peak = -1e300, ypeak = 1.0;
    for (double y = 1e-3; y < 1e4; y *= 1.02) {
        double v = g(y);
        if (v > peak) {
            peak = v;
            ypeak = y;
        }
    }
    double lo = std::max(ypeak, 1.0), hi = lo;
    while (g(hi) > peak - kCutoffEfolds) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8)
            throw NumericError("rotated integrand does not decay");
    }
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > peak - kCutoffEfolds ? lo : hi) = mid;
    }
    return hi;
}

struct Integral {
    cplx value;
    double error;
    double l1;
};

template <class F>
Integral gk(F&& f, double L, double tol, unsigned depth) {
    double err = 0.0, l1 = 0.0;
    auto v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, -L, L, depth, tol, &err, &l1);
    return {cplx(v), err, l1};
}

void check_converged(const Integral& r, double tol, const char* what) {
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
        throw NumericError(std::string("quadrature produced a non-finite value for ") + what);
    if (r.error > 10.0 * tol * std::max(r.l1, 1e-300))
        throw NumericError(std::string("quadrature did not converge within budget for ") + what +
                           " (error " + std::to_string(r.error) + ", L1 " + std::to_string(r.l1) + ")");
}

// Nested product-rule integration over the box prod_j [-L_j, L_j].
class Nested {
  public:
    Nested(std::vector<double> L, double tol, unsigned depth) : L_(std::move(L)), tol_(tol), depth_(depth) {}

    template <class G>
    Integral integrate(G&& g) const {
        std::vector<double> y(L_.size(), 0.0);
        return level(g, 0, y);
    }

  private:
    template <class G>
    Integral level(G& g, std::size_t j, std::vector<double>& y) const {
        const bool inner = j + 1 == L_.size();
        // inner integrals run tighter so that the outer rule sees a smooth function
        const double tol = tol_ * std::pow(0.1, static_cast<double>(j));
        if (inner) {
            return gk(
                [&](double t) {
                    y[j] = t;
                    return g(std::span<const double>(y));
                },
                L_[j], tol, depth_);
        }
        return gk(
            [&](double t) {
                y[j] = t;
                return level(g, j + 1, y).value;
            },
            L_[j], tol, depth_);
    }

    std::vector<double> L_;
    double tol_;
    unsigned depth_;
};

double default_tol(int N, const QuadratureOptions& o) {
    if (o.tol)
        return *o.tol;
    return N == 1 ? 1e-9 : 1e-7;
}

// Contour setup shared by numerator and denominator integrals.
struct Contour {
    std::vector<double> phi;
    std::vector<cplx> rot;
    std::vector<double> L;
};

Contour make_contour(const ComplexWeightSpec& spec, const QuadratureOptions& o, std::span<const int> degree_hint) {
    const int N = spec.dimension();
    Contour c;
    for (int j = 0; j < N; ++j) {
        double phi = o.rotation_angle ? *o.rotation_angle : spec.default_rotation(j);
        check_rotation(spec, j, phi);
        c.phi.push_back(phi);
        c.rot.push_back(std::polar(1.0, phi));
        c.L.push_back(half_width(envelope(spec, j, phi), degree_hint[static_cast<std::size_t>(j)]));
    }
    return c;
}

struct Normalization {
    cplx z;
    double abs_z;
    Integral raw;
};

Normalization normalization(const ComplexWeightSpec& spec, const Contour& c, const Nested& nest, double tol,
                            double floor) {
    const std::size_t N = c.rot.size();
    auto weight = [&](std::span<const double> y) {
        std::vector<cplx> x(N);
        for (std::size_t j = 0; j < N; ++j)
            x[j] = c.rot[j] * y[j];
        return std::exp(spec.log_weight(x));
    };
    auto z = nest.integrate(weight);
    check_converged(z, tol, "normalization");
    auto scale = nest.integrate([&](std::span<const double> y) { return cplx(std::abs(weight(y))); });
    if (!(std::abs(z.value) > floor * scale.value.real()))
        throw NumericError("|Z_c| is below the configured floor; normalization is ill-posed");
    return {z.value, std::abs(z.value), z};
}

struct OneDim {
    cplx ratio;
    double abs_z;
    double rel_err;
};

// <y^m> for the j-th factor of a separable weight, by 1D quadrature.
OneDim separable_factor_moment(const ComplexWeightSpec& spec, int j, int m, const QuadratureOptions& o) {
    const double tol = o.tol ? *o.tol : 1e-9;
    double phi = o.rotation_angle ? *o.rotation_angle : spec.default_rotation(j);
    check_rotation(spec, j, phi);
    const cplx rot = std::polar(1.0, phi);
    const double L = half_width(envelope(spec, j, phi), m);

    std::function<cplx(cplx)> logc;
    if (auto* q = std::get_if<QuarticPhase>(&spec.variant())) {
        double g = q->g[static_cast<std::size_t>(j)];
        logc = [g](cplx x) { auto x2 = x * x; return -I * g * x2 * x2; };
    } else {
        cplx s = spec.quadratic_coefficient(j);
        logc = [s](cplx x) { return I * s * x * x; };
    }
    auto c = [&](double y) { return std::exp(logc(rot * y)); };

    auto den = gk(c, L, tol, o.max_depth);
    check_converged(den, tol, "normalization");
    auto absden = gk([&](double y) { return std::abs(c(y)); }, L, tol, o.max_depth);
    if (!(std::abs(den.value) > o.z_floor * absden.value.real()))
        throw NumericError("|Z_c| is below the configured floor; normalization is ill-posed");
    if (m == 0)
        return {1.0, std::abs(den.value), den.error / std::abs(den.value)};
    auto num = gk([&](double y) { return std::pow(y, m) * c(y); }, L, tol, o.max_depth);
    check_converged(num, tol, "moment");
    cplx ratio = std::pow(rot, m) * num.value / den.value;
    double rel = den.error / std::abs(den.value) + (std::abs(num.value) > 0 ? num.error / std::abs(num.value) : 0.0);
    return {ratio, std::abs(den.value), rel};
}

} // namespace

OscillatoryResult oscillatory_expectation(const ComplexWeightSpec& spec, const Observable& f,
                                          const QuadratureOptions& opts) {
    if (spec.is_tabulated())
        throw std::invalid_argument("oscillatory quadrature needs a closed-form weight");
    const int N = spec.dimension();
    if (N > 3)
        throw std::invalid_argument("oscillatory quadrature is limited to N <= 3");
    const double tol = default_tol(N, opts);
    std::vector<int> hint(static_cast<std::size_t>(N), 4);
    auto c = make_contour(spec, opts, hint);
    Nested nest(c.L, tol, opts.max_depth);
    auto norm = normalization(spec, c, nest, tol, opts.z_floor);

    const std::size_t n = static_cast<std::size_t>(N);
    auto num = nest.integrate([&](std::span<const double> y) {
        std::vector<cplx> x(n);
        for (std::size_t j = 0; j < n; ++j)
            x[j] = c.rot[j] * y[j];
        return f(x) * std::exp(spec.log_weight(x));
    });
    check_converged(num, tol, "expectation");
    cplx value = num.value / norm.z;
    double err = std::abs(value) * (num.error / std::max(std::abs(num.value), 1e-300) +
                                    norm.raw.error / norm.abs_z);
    return {value, norm.abs_z, err};
}

OscillatoryResult oscillatory_moment(const ComplexWeightSpec& spec, const MultiIndex& m,
                                     const QuadratureOptions& opts) {
    if (spec.is_tabulated())
        throw std::invalid_argument("oscillatory quadrature needs a closed-form weight");
    const int N = spec.dimension();
    if (m.dimension() != N)
        throw std::invalid_argument("oscillatory_moment: multi-index dimension mismatch");

    if (spec.separable()) {
        OscillatoryResult r{1.0, 1.0, 0.0};
        double rel = 0.0;
        for (int j = 0; j < N; ++j) {
            auto one = separable_factor_moment(spec, j, m[j], opts);
            r.value *= one.ratio;
            r.abs_normalization *= one.abs_z;
            rel += one.rel_err;
        }
        r.error_estimate = std::abs(r.value) * rel;
        return r;
    }

    if (N > 3)
        throw std::invalid_argument("oscillatory quadrature is limited to N <= 3");
    const double tol = default_tol(N, opts);
    auto c = make_contour(spec, opts, m.exponents());
    Nested nest(c.L, tol, opts.max_depth);
    auto norm = normalization(spec, c, nest, tol, opts.z_floor);
    if (m.is_zero())
        return {1.0, norm.abs_z, norm.raw.error / norm.abs_z};

    const std::size_t n = static_cast<std::size_t>(N);
    auto num = nest.integrate([&](std::span<const double> y) {
        std::vector<cplx> x(n);
        double mono = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = c.rot[j] * y[j];
            for (int e = 0; e < m[static_cast<int>(j)]; ++e)
                mono *= y[j];
        }
        return mono * std::exp(spec.log_weight(x));
    });
    check_converged(num, tol, "moment");
    cplx phase = 1.0;
    for (std::size_t j = 0; j < n; ++j)
        phase *= std::pow(c.rot[j], m[static_cast<int>(j)]);
    cplx value = phase * num.value / norm.z;
    double err = std::abs(value) * (num.error / std::max(std::abs(num.value), 1e-300) +
                                    norm.raw.error / norm.abs_z);
    return {value, norm.abs_z, err};
}

ComplexMomentTable build_moment_table(const ComplexWeightSpec& spec, int D, const QuadratureOptions& opts) {
    if (D < 0)
        throw std::invalid_argument("build_moment_table: D must be >= 0");
    if (auto* t = std::get_if<Tabulated>(&spec.variant()))
        return t->table->truncated(D);

    const int N = spec.dimension();
    const auto indices = multi_indices_up_to(N, D);
    std::map<MultiIndex, MomentEntry> entries;

    if (spec.separable()) {
        const bool analytic = !std::holds_alternative<QuarticPhase>(spec.variant());
        // one-dimensional factor moments, cached per (coordinate, exponent)
        std::vector<std::vector<cplx>> f(static_cast<std::size_t>(N));
        double abs_z = 1.0;
        for (int j = 0; j < N; ++j) {
            auto& fj = f[static_cast<std::size_t>(j)];
            for (int e = 0; e <= D; ++e) {
                if (e % 2) {
                    fj.push_back(0.0);
                } else if (analytic) {
                    fj.push_back(gaussian_moment(spec.quadratic_coefficient(j), e));
                } else {
                    auto one = separable_factor_moment(spec, j, e, opts);
                    fj.push_back(one.ratio);
                    if (e == 0)
                        abs_z *= one.abs_z;
                }
            }
            if (analytic)
                abs_z *= std::sqrt(std::numbers::pi / std::abs(spec.quadratic_coefficient(j)));
        }
        for (const auto& m : indices) {
            cplx v = 1.0;
            bool odd = false;
            for (int j = 0; j < N; ++j) {
                odd = odd || (m[j] % 2 == 1);
                v *= f[static_cast<std::size_t>(j)][static_cast<std::size_t>(m[j])];
            }
            Provenance p = odd ? Provenance::symmetry : (analytic ? Provenance::analytic : Provenance::quadrature);
            if (m.is_zero())
                v = 1.0;
            entries.emplace(m, MomentEntry{odd ? cplx(0.0) : v, p});
        }
        return ComplexMomentTable(N, D, std::move(entries), abs_z);
    }

    // Non-separable (lattice): invariant under the global reflection x -> -x.
    std::optional<double> abs_z;
    for (const auto& m : indices) {
        if (m.is_zero()) {
            auto r = oscillatory_moment(spec, m, opts);
            abs_z = r.abs_normalization;
            entries.emplace(m, MomentEntry{1.0, Provenance::analytic});
        } else if (m.degree() % 2) {
            entries.emplace(m, MomentEntry{0.0, Provenance::symmetry});
        } else {
            auto r = oscillatory_moment(spec, m, opts);
            entries.emplace(m, MomentEntry{r.value, Provenance::quadrature});
        }
    }
    return ComplexMomentTable(N, D, std::move(entries), abs_z);
}

ComplexMomentTable read_moment_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open moment table " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("index", 0) != 0)
        throw std::runtime_error("moment table " + path + ": expected header 'index,re,im'");
    std::map<MultiIndex, MomentEntry> entries;
    int N = 0, D = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string idx, re, im;
        std::getline(ss, idx, ',');
        std::getline(ss, re, ',');
        std::getline(ss, im, ',');
        auto m = MultiIndex::parse(idx);
        if (N == 0)
            N = m.dimension();
        D = std::max(D, m.degree());
        entries[m] = MomentEntry{cplx(std::stod(re), std::stod(im)), Provenance::tabulated};
    }
    if (N == 0)
        throw std::runtime_error("moment table " + path + " is empty");
    // The cutoff is the largest degree for which the table is complete.
    int complete = -1;
    for (int d = 0; d <= D; ++d) {
        bool ok = true;
        for (const auto& m : multi_indices_up_to(N, d))
            ok = ok && entries.count(m);
        if (!ok)
            break;
        complete = d;
    }
    if (complete < 0)
        throw std::runtime_error("moment table " + path + " lacks the zero index");
    std::erase_if(entries, [&](const auto& kv) { return kv.first.degree() > complete; });
    return ComplexMomentTable(N, complete, std::move(entries));
}

} // namespace posrep
