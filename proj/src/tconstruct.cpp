#include "posrep/tconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "posrep/error.hpp"

namespace posrep {

double lambda_min(int N) {
    if (N < 1)
        throw std::invalid_argument("lambda_min: N must be >= 1");
    if (N == 1)
        return 3.0;
    return 1.0 / (1.0 - std::pow(2.0 / 3.0, 1.0 / N));
}

double s_lower_bound(double lambda, int N) {
    if (!(lambda > 1.0))
        throw std::invalid_argument("s_lower_bound: lambda must exceed 1");
    return 3.0 - 2.0 * std::pow(lambda / (lambda - 1.0), N);
}

double s_upper_envelope(double lambda, int N) {
    if (!(lambda > 1.0))
        throw std::invalid_argument("s_upper_envelope: lambda must exceed 1");
    return 2.0 * std::pow(lambda / (lambda - 1.0), N) - 1.0;
}

double tail_bound(double lambda, int N, int D) {
    if (!(lambda > 1.0))
        throw std::invalid_argument("tail_bound: lambda must exceed 1");
    if (N < 1 || D < 0)
        throw std::invalid_argument("tail_bound: need N >= 1 and D >= 0");
    // Terms count(N,d) lambda^{-d} eventually decrease geometrically; sum until
    // they no longer change the total.
    const double x = 1.0 / lambda;
    double sum = 0.0;
    double term = static_cast<double>(count_of_degree(N, D + 1)) * std::pow(x, D + 1);
    for (int d = D + 1; d < D + 100000; ++d) {
        sum += term;
        // count(N, d+1) / count(N, d) = (d + N) / (d + 1)
        double next = term * x * (d + N) / (d + 1.0);
        if (next < 1e-18 * sum && next < term)
            break;
        term = next;
    }
    return 2.0 * sum;
}

int adaptive_cutoff(double lambda, int N, double fraction) {
    const double lb = s_lower_bound(lambda, N);
    if (!(lb > 0.0))
        throw std::invalid_argument(
            fmt::format("adaptive_cutoff: lambda {} is not above the positivity threshold {}", lambda, lambda_min(N)));
    for (int D = 0; D < 10000; ++D)
        if (tail_bound(lambda, N, D) < fraction * lb)
            return D;
    throw NumericError("adaptive_cutoff: no cutoff reaches the requested tail");
}

LambdaChoice LambdaChoice::with_margin(int N, double margin) {
    LambdaChoice c{margin * lambda_min(N), N, margin};
    c.validate();
    return c;
}

LambdaChoice LambdaChoice::fixed(int N, double lambda, double margin) {
    LambdaChoice c{lambda, N, margin};
    c.validate();
    return c;
}

void LambdaChoice::validate() const {
    if (dimension < 1)
        throw std::invalid_argument("LambdaChoice: dimension must be >= 1");
    if (!(margin_factor >= 1.0))
        throw std::invalid_argument("LambdaChoice: margin factor must be >= 1");
    const double need = margin_factor * lambda_min(dimension);
    if (!(lambda >= need * (1.0 - 1e-15)))
        throw std::invalid_argument(
            fmt::format("LambdaChoice: lambda {} is below margin * lambda_min = {}", lambda, need));
}

// ---------------------------------------------------------------------------

AngularSeries::AngularSeries(int N, int D, double lambda, std::vector<MultiIndex> indices, std::vector<cplx> gamma)
    : N_(N), D_(D), lambda_(lambda), indices_(std::move(indices)), gamma_(std::move(gamma)) {
    if (N_ < 1 || D_ < 0 || !(lambda_ > 1.0))
        throw std::invalid_argument("AngularSeries: need N >= 1, D >= 0, lambda > 1");
    if (indices_.size() != gamma_.size())
        throw std::invalid_argument("AngularSeries: index/coefficient count mismatch");
    bool have_zero = false;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        const auto& m = indices_[i];
        if (m.dimension() != N_ || m.degree() > D_)
            throw std::invalid_argument("AngularSeries: index " + m.str() + " outside dimension/cutoff");
        if (m.is_zero()) {
            if (gamma_[i] != cplx(1.0, 0.0))
                throw std::invalid_argument("AngularSeries: zero-index coefficient must be 1");
            have_zero = true;
            continue;
        }
        const double cap = std::pow(lambda_, -m.degree());
        if (!(std::abs(gamma_[i]) <= cap * (1.0 + 1e-12)))
            throw CheckError(fmt::format("AngularSeries: |gamma_{}| = {} exceeds lambda^-|m| = {}", m.str(),
                                         std::abs(gamma_[i]), cap));
        if (gamma_[i] == cplx(0.0, 0.0))
            continue;
        exps_.insert(exps_.end(), m.exponents().begin(), m.exponents().end());
        nz_gamma_.push_back(gamma_[i]);
    }
    if (!have_zero)
        throw std::invalid_argument("AngularSeries: missing zero index");
}

cplx AngularSeries::coefficient(const MultiIndex& m) const {
    for (std::size_t i = 0; i < indices_.size(); ++i)
        if (indices_[i] == m)
            return gamma_[i];
    if (m.dimension() == N_ && m.degree() > D_)
        throw std::out_of_range("AngularSeries: index " + m.str() + " above cutoff");
    return 0.0;
}

double AngularSeries::evaluate(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != N_)
        throw std::invalid_argument("AngularSeries: wrong number of angles");
    // powers e^{-i k theta_j}, k = 0..D
    const std::size_t stride = static_cast<std::size_t>(D_ + 1);
    cplx pw_stack[4 * 33];
    std::vector<cplx> pw_heap;
    cplx* pw = pw_stack;
    if (static_cast<std::size_t>(N_) * stride > std::size(pw_stack)) {
        pw_heap.resize(static_cast<std::size_t>(N_) * stride);
        pw = pw_heap.data();
    }
    for (int j = 0; j < N_; ++j) {
        const cplx step = std::polar(1.0, -theta[static_cast<std::size_t>(j)]);
        cplx* row = pw + static_cast<std::size_t>(j) * stride;
        row[0] = 1.0;
        for (std::size_t k = 1; k < stride; ++k)
            row[k] = row[k - 1] * step;
    }
    double acc = 0.0;
    const std::size_t n = static_cast<std::size_t>(N_);
    for (std::size_t i = 0; i < nz_gamma_.size(); ++i) {
        cplx term = nz_gamma_[i];
        for (std::size_t j = 0; j < n; ++j)
            term *= pw[j * stride + static_cast<std::size_t>(exps_[i * n + j])];
        acc += term.real();
    }
    return 1.0 + 2.0 * acc;
}

double AngularSeries::envelope() const {
    double s = 0.0;
    for (const auto& g : nz_gamma_)
        s += std::abs(g);
    return 1.0 + 2.0 * s;
}

AngularSeries build_angular(const ComplexMomentTable& table, const RadialMomentModel& model,
                            const LambdaChoice& lambda, int D) {
    lambda.validate();
    if (table.dimension() != lambda.dimension || model.dimension() != lambda.dimension)
        throw std::invalid_argument("build_angular: table, model and lambda dimensions differ");
    if (D > table.cutoff())
        throw std::invalid_argument(
            fmt::format("build_angular: cutoff {} exceeds the moment table ({})", D, table.cutoff()));
    auto dom = dominance_check(table, model, D);
    if (!dom.pass)
        throw CheckError("build_angular: dominance fails at " + dom.first_failure->str());

    std::vector<MultiIndex> idx;
    std::vector<cplx> gamma;
    for (const auto& m : multi_indices_up_to(lambda.dimension, D)) {
        idx.push_back(m);
        if (m.is_zero()) {
            gamma.emplace_back(1.0, 0.0);
            continue;
        }
        gamma.push_back(table.at(m) / (std::pow(lambda.lambda, m.degree()) * radial_moment(model, m)));
    }
    return AngularSeries(lambda.dimension, D, lambda.lambda, std::move(idx), std::move(gamma));
}

double s_eval(const AngularSeries& series, std::span<const double> theta) {
    for (double t : theta)
        if (!std::isfinite(t))
            throw std::invalid_argument("s_eval: non-finite angle");
    double s = series.evaluate(theta);
    if (std::isnan(s))
        throw NumericError("s_eval: NaN");
    if (s < -series.tail())
        throw NumericError(fmt::format("s_eval: s = {} below -tail = {}; angular series invariants are broken", s,
                                       -series.tail()));
    return s;
}

cplx f_lambda(const RadialModel1D& model, double lambda, cplx y) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("f_lambda: lambda must be positive");
    constexpr int kMaxTerms = 250;
    constexpr double kRemainder = 1e-12;
    const double ay = std::abs(y);
    cplx sum = 0.0, term = 1.0;
    double mu_m = 1.0;
    for (int m = 0; m < kMaxTerms; ++m) {
        sum += term;
        double mu_next;
        try {
            mu_next = model.moment(m + 1);
        } catch (const NumericError&) {
            throw NumericError("f_lambda: series did not converge before the model's moments overflowed");
        }
        const double rho = mu_next / mu_m;
        const double q = ay / (lambda * rho);
        const cplx next = term * y / (lambda * rho);
        if (q < 1.0 && std::abs(next) / (1.0 - q) < kRemainder)
            return sum;
        if (!std::isfinite(std::abs(next)))
            break;
        term = next;
        mu_m = mu_next;
    }
    throw NumericError(fmt::format("f_lambda: series diverges at |y| = {} for lambda = {}", ay, lambda));
}

double TDensity::density(std::span<const cplx> z) const {
    const int N = dimension();
    if (static_cast<int>(z.size()) != N)
        throw std::invalid_argument("TDensity: wrong number of coordinates");
    std::vector<double> theta(static_cast<std::size_t>(N));
    double radial_part = 1.0;
    for (int j = 0; j < N; ++j) {
        const auto& zj = z[static_cast<std::size_t>(j)];
        double r = std::abs(zj);
        if (r == 0.0)
            return 0.0;
        double th = std::arg(zj);
        theta[static_cast<std::size_t>(j)] = th < 0.0 ? th + 2.0 * std::numbers::pi : th;
        radial_part *= radial.factor(j).density(r / lambda()) / r;
    }
    return radial_part * angular.evaluate(theta) / normalization;
}

TDensity construct_t(const ComplexMomentTable& table, const RadialMomentModel& model, const LambdaChoice& lambda,
                     int D) {
    auto series = build_angular(table, model, lambda, D);
    double z = 1.0;
    for (int j = 0; j < model.dimension(); ++j)
        z *= 2.0 * std::numbers::pi * lambda.lambda * model.factor(j).normalization();
    return TDensity{model, std::move(series), z};
}

cplx t_moment_roundtrip(const TDensity& t, const MultiIndex& m) {
    if (m.dimension() != t.dimension())
        throw std::invalid_argument("t_moment_roundtrip: dimension mismatch");
    if (m.degree() > t.angular.cutoff())
        throw std::invalid_argument(
            fmt::format("t_moment_roundtrip: degree {} above cutoff {}", m.degree(), t.angular.cutoff()));
    return std::pow(t.lambda(), m.degree()) * radial_moment(t.radial, m) * t.angular.coefficient(m);
}

PositivityCertificate certify_positivity(const AngularSeries& series, long target_points, Exec exec) {
    if (target_points < 1)
        throw std::invalid_argument("certify_positivity: need at least one grid point");
    const int N = series.dimension();
    long per_dim = static_cast<long>(std::ceil(std::pow(static_cast<double>(target_points), 1.0 / N) - 1e-9));
    per_dim = std::max(per_dim, 1L);
    long total = 1;
    for (int j = 0; j < N; ++j)
        total *= per_dim;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(per_dim);

    double gmin = std::numeric_limits<double>::infinity();
    double gmax = -std::numeric_limits<double>::infinity();
    auto point = [&](long flat, std::vector<double>& theta) {
        for (int j = 0; j < N; ++j) {
            theta[static_cast<std::size_t>(j)] = h * static_cast<double>(flat % per_dim);
            flat /= per_dim;
        }
        return series.evaluate(theta);
    };

    if (exec == Exec::serial) {
        std::vector<double> theta(static_cast<std::size_t>(N));
        for (long p = 0; p < total; ++p) {
            double s = point(p, theta);
            gmin = std::min(gmin, s);
            gmax = std::max(gmax, s);
        }
    } else {
#pragma omp parallel reduction(min : gmin) reduction(max : gmax)
        {
            std::vector<double> theta(static_cast<std::size_t>(N));
#pragma omp for schedule(static)
            for (long p = 0; p < total; ++p) {
                double s = point(p, theta);
                gmin = std::min(gmin, s);
                gmax = std::max(gmax, s);
            }
        }
    }

    PositivityCertificate c;
    c.lower_bound = s_lower_bound(series.lambda(), N);
    c.tail = series.tail();
    c.grid_min = gmin;
    c.grid_max = gmax;
    c.upper_envelope = s_upper_envelope(series.lambda(), N);
    c.grid_points = total;
    c.certified = gmin >= c.lower_bound - c.tail;
    c.positive = gmin > 0.0;
    return c;
}

} // namespace posrep
