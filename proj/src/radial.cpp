#include "posrep/radial.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include "posrep/error.hpp"

namespace posrep {

struct RadialModel1D::Cache {
    std::mutex mu;
    std::map<int, double> moments;
    std::optional<double> mass;
};

namespace {

constexpr double kMomentTol = 1e-10;

double half_line_integral(const std::function<double(double)>& f, const std::string& what) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    double v = 0.0;
    try {
        v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), kMomentTol, &err, &l1, &levels);
    } catch (const std::exception& e) {
        throw NumericError("divergent or non-integrable " + what + ": " + e.what());
    }
    if (!std::isfinite(v) || !std::isfinite(err) || err > 1e3 * kMomentTol * std::max(l1, 1e-300))
        throw NumericError("divergent or non-integrable " + what);
    return v;
}

// r^m d with the far tail (d underflowed, r^m overflowed) taken as 0
double weighted_power(double r, int m, double d) { return d == 0.0 ? 0.0 : std::pow(r, m) * d; }

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i)
        c = c * (n - k + i) / i;
    return c;
}

} // namespace

double AnharmonicDensity::quadratic_coefficient() const {
    return form == KineticForm::derived ? std::numbers::sqrt2 * mu / delta : std::numbers::sqrt2 / (mu * delta);
}

RadialModel1D::RadialModel1D(Variant v) : v_(std::move(v)), cache_(std::make_shared<Cache>()) {
    std::visit(
        [](auto& w) {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, ExplicitDensity>) {
                if (!w.density)
                    throw std::invalid_argument("ExplicitDensity: empty density");
            } else if constexpr (std::is_same_v<W, DeltaAtB>) {
                if (!(w.B > 0.0) || !std::isfinite(w.B))
                    throw std::invalid_argument("DeltaAtB: B must be positive");
            } else if constexpr (std::is_same_v<W, AnharmonicDensity>) {
                if (!(w.mu > 0.0) || !(w.kappa > 0.0) || !(w.delta > 0.0) || !(w.scale > 0.0))
                    throw std::invalid_argument("AnharmonicDensity: parameters must be positive");
            } else if constexpr (std::is_same_v<W, Shifted>) {
                if (!w.base)
                    throw std::invalid_argument("Shifted: null base model");
                if (!(w.a > 0.0))
                    throw std::invalid_argument("Shifted: shift must be positive");
            } else {
                if (w.nodes.empty() || w.nodes.size() != w.weights.size())
                    throw std::invalid_argument("DiscreteMeasure: need matching, nonempty nodes and weights");
                double total = 0.0;
                for (std::size_t i = 0; i < w.nodes.size(); ++i) {
                    if (!(w.weights[i] > 0.0))
                        throw std::invalid_argument("DiscreteMeasure: weights must be positive");
                    if (!(w.nodes[i] >= 0.0) || (i > 0 && !(w.nodes[i] > w.nodes[i - 1])))
                        throw std::invalid_argument("DiscreteMeasure: nodes must be >= 0 and strictly increasing");
                    total += w.weights[i];
                }
                for (double& x : w.weights)
                    x /= total;
            }
        },
        v_);
}

RadialModel1D RadialModel1D::half_gaussian() {
    return explicit_density("half_gaussian", [](double r) { return std::exp(-0.5 * r * r); });
}

RadialModel1D RadialModel1D::exponential() {
    return explicit_density("exponential", [](double r) { return std::exp(-r); });
}

RadialModel1D RadialModel1D::explicit_density(std::string name, std::function<double(double)> density) {
    return RadialModel1D(ExplicitDensity{std::move(name), std::move(density)});
}

std::string RadialModel1D::describe() const {
    return std::visit(
        [](const auto& w) -> std::string {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, ExplicitDensity>)
                return w.name;
            else if constexpr (std::is_same_v<W, DeltaAtB>)
                return fmt::format("delta(B={})", w.B);
            else if constexpr (std::is_same_v<W, AnharmonicDensity>)
                return fmt::format("anharmonic(mu={},kappa={},delta={},kinetic={},scale={})", w.mu, w.kappa, w.delta,
                                   w.form == KineticForm::derived ? "derived" : "literal", w.scale);
            else if constexpr (std::is_same_v<W, Shifted>)
                return fmt::format("shifted({},a={})", w.base->describe(), w.a);
            else
                return fmt::format("discrete(n={})", w.nodes.size());
        },
        v_);
}

double RadialModel1D::compute_moment(int m) const {
    return std::visit(
        [&](const auto& w) -> double {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, ExplicitDensity>) {
                double mass = normalization();
                auto f = w.density;
                return half_line_integral([&](double r) { return weighted_power(r, m, f(r)); },
                                          fmt::format("moment {} of {}", m, w.name)) /
                       mass;
            } else if constexpr (std::is_same_v<W, DeltaAtB>) {
                return std::pow(w.B, m);
            } else if constexpr (std::is_same_v<W, AnharmonicDensity>) {
                const double c = w.quadratic_coefficient(), q = w.quartic_coefficient();
                auto p = [c, q](double r) { return std::exp(c * r * r - q * r * r * r * r); };
                double base = half_line_integral([&](double r) { return weighted_power(r, m, p(r)); }, "anharmonic moment") /
                              half_line_integral(p, "anharmonic normalization");
                return std::pow(w.scale, m) * base;
            } else if constexpr (std::is_same_v<W, Shifted>) {
                double s = 0.0;
                for (int j = 0; j <= m; ++j)
                    s += binomial(m, j) * std::pow(w.a, m - j) * w.base->moment(j);
                return s;
            } else {
                double s = 0.0;
                for (std::size_t i = 0; i < w.nodes.size(); ++i)
                    s += w.weights[i] * std::pow(w.nodes[i], m);
                return s;
            }
        },
        v_);
}

double RadialModel1D::moment(int m) const {
    if (m < 0)
        throw std::invalid_argument("moment: m must be >= 0");
    if (m == 0)
        return 1.0;
    {
        std::lock_guard lock(cache_->mu);
        if (auto it = cache_->moments.find(m); it != cache_->moments.end())
            return it->second;
    }
    double v = compute_moment(m);
    if (!std::isfinite(v) || !(v > 0.0))
        throw NumericError(fmt::format("moment {} of {} is not finite and positive", m, describe()));
    std::lock_guard lock(cache_->mu);
    cache_->moments.emplace(m, v);
    return v;
}

std::vector<double> RadialModel1D::moments(int mmax) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(mmax + 1));
    for (int m = 0; m <= mmax; ++m)
        out.push_back(moment(m));
    return out;
}

double RadialModel1D::normalization() const {
    {
        std::lock_guard lock(cache_->mu);
        if (cache_->mass)
            return *cache_->mass;
    }
    double mass = std::visit(
        [](const auto& w) -> double {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, ExplicitDensity>) {
                return half_line_integral(w.density, "normalization of " + w.name);
            } else if constexpr (std::is_same_v<W, AnharmonicDensity>) {
                const double c = w.quadratic_coefficient(), q = w.quartic_coefficient();
                return w.scale * half_line_integral([c, q](double r) { return std::exp(c * r * r - q * r * r * r * r); },
                                                    "anharmonic normalization");
            } else if constexpr (std::is_same_v<W, Shifted>) {
                return w.base->normalization();
            } else {
                return 1.0;
            }
        },
        v_);
    if (!(mass > 0.0))
        throw NumericError("model " + describe() + " has no positive mass");
    std::lock_guard lock(cache_->mu);
    cache_->mass = mass;
    return mass;
}

bool RadialModel1D::has_density() const {
    if (auto* s = std::get_if<Shifted>(&v_))
        return s->base->has_density();
    return std::holds_alternative<ExplicitDensity>(v_) || std::holds_alternative<AnharmonicDensity>(v_);
}

double RadialModel1D::density(double r) const {
    if (r < 0.0)
        return 0.0;
    if (auto* e = std::get_if<ExplicitDensity>(&v_))
        return e->density(r);
    if (auto* a = std::get_if<AnharmonicDensity>(&v_)) {
        double x = r / a->scale;
        return std::exp(a->quadratic_coefficient() * x * x - a->quartic_coefficient() * x * x * x * x);
    }
    if (auto* s = std::get_if<Shifted>(&v_))
        return r < s->a ? 0.0 : s->base->density(r - s->a);
    throw std::logic_error("model " + describe() + " has no density");
}

RadialMomentModel::RadialMomentModel(std::vector<RadialModel1D> factors) : factors_(std::move(factors)) {
    if (factors_.empty())
        throw std::invalid_argument("RadialMomentModel: need at least one factor");
}

RadialMomentModel RadialMomentModel::iid(const RadialModel1D& factor, int N) {
    if (N < 1)
        throw std::invalid_argument("RadialMomentModel: N must be >= 1");
    return RadialMomentModel(std::vector<RadialModel1D>(static_cast<std::size_t>(N), factor));
}

std::string RadialMomentModel::describe() const {
    std::string out = "product[";
    for (std::size_t j = 0; j < factors_.size(); ++j)
        out += (j ? "," : "") + factors_[j].describe();
    return out + "]";
}

double radial_moment(const RadialMomentModel& model, const MultiIndex& m) {
    if (m.dimension() != model.dimension())
        throw std::invalid_argument("radial_moment: multi-index dimension mismatch");
    double v = 1.0;
    for (int j = 0; j < m.dimension(); ++j)
        v *= model.factor(j).moment(m[j]);
    return v;
}

DominanceReport dominance_check(const ComplexMomentTable& table, const RadialMomentModel& model, int D) {
    if (table.dimension() != model.dimension())
        throw std::invalid_argument("dominance_check: table and model dimensions differ");
    if (D > table.cutoff())
        throw std::invalid_argument("dominance_check: cutoff exceeds table");
    DominanceReport rep;
    rep.cutoff = D;
    bool first = true;
    for (const auto& m : multi_indices_up_to(table.dimension(), D)) {
        double bound = radial_moment(model, m);
        double mag = std::abs(table.at(m));
        if (!(mag <= bound) && rep.pass) {
            rep.pass = false;
            rep.first_failure = m;
        }
        if (m.is_zero())
            continue;
        double gap = bound - mag;
        if (first || gap < rep.margin)
            rep.margin = gap;
        first = false;
    }
    return rep;
}

RadialModel1D shift_model(const RadialModel1D& model, double a) {
    return RadialModel1D(Shifted{std::make_shared<const RadialModel1D>(model), a});
}

GrowthReport growth_check(const RadialModel1D& model, double R, int mmax) {
    if (!(R > 0.0))
        throw std::invalid_argument("growth_check: R must be positive");
    if (mmax < 0)
        throw std::invalid_argument("growth_check: mmax must be >= 0");
    GrowthReport rep;
    double best = 0.0; // log ratio at m = 0
    for (int m = 1; m <= mmax; ++m) {
        double lr = std::log(model.moment(m)) - m * std::log(R);
        if (lr < best) {
            best = lr;
            rep.argmin = m;
        }
    }
    rep.b_R = std::exp(best);
    rep.decaying = mmax > 0 && rep.argmin == mmax;
    return rep;
}

} // namespace posrep
