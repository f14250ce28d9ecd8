#include "posrep/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "posrep/error.hpp"
#include "posrep/rng.hpp"

namespace posrep {

AnharmonicBound anharmonic_bound(const OscillatorParams& params, const ComplexMomentTable& table, int D,
                                 KineticForm form, int max_escalations) {
    params.validate();
    if (table.dimension() != params.T)
        throw std::invalid_argument("anharmonic_bound: table dimension differs from T");
    if (D < 0 || D > table.cutoff())
        throw std::invalid_argument("anharmonic_bound: cutoff outside the table");

    const double z_hat = RadialModel1D::anharmonic(params.mu, params.kappa, params.delta, form).normalization();
    double abs_z = 0.0;
    if (auto z = table.abs_normalization()) {
        abs_z = *z;
    } else {
        auto r = oscillatory_expectation(ComplexWeightSpec::anharmonic_lattice(params),
                                         [](std::span<const cplx>) { return cplx(1.0); });
        abs_z = std::abs(r.value);
    }
    if (!(abs_z > 0.0))
        throw NumericError("anharmonic_bound: |Z_c| vanishes");

    const double T = params.T;
    // |<x^m>_c| <= (2 Z_hat)^T / |Z_c| prod_j <r^{m_j}>_hat along the rotated contour
    const double ratio = std::pow(2.0 * z_hat, T) / abs_z;
    AnharmonicBound out{RadialMomentModel({RadialModel1D::delta(1.0)}), 1.0, 1.0, 0, z_hat, abs_z, {}};
    out.initial_scale = std::max(1.0, std::pow(ratio, 1.0 / T));
    double scale = out.initial_scale;
    for (int esc = 0; esc <= max_escalations; ++esc) {
        auto model = RadialMomentModel::iid(
            RadialModel1D::anharmonic(params.mu, params.kappa, params.delta, form, scale), params.T);
        auto rep = dominance_check(table, model, D);
        if (rep.pass) {
            out.model = std::move(model);
            out.scale = scale;
            out.escalations = esc;
            out.dominance = rep;
            return out;
        }
        scale *= 1.5;
    }
    throw CheckError(fmt::format("anharmonic_bound: dominance not reached after {} escalations", max_escalations));
}

cplx direct_lattice_moment(const OscillatorParams& params, const MultiIndex& m, double tol,
                           std::optional<double> angle) {
    params.validate();
    if (params.T > 3)
        throw std::invalid_argument("direct_lattice_moment: T <= 3 only");
    if (m.dimension() != params.T)
        throw std::invalid_argument("direct_lattice_moment: index dimension differs from T");
    if (m.degree() % 2)
        return 0.0;
    QuadratureOptions o;
    o.tol = tol;
    o.rotation_angle = angle;
    return oscillatory_moment(ComplexWeightSpec::anharmonic_lattice(params), m, o).value;
}

std::string to_string(ModeRotation r) {
    switch (r) {
    case ModeRotation::plus:
        return "plus";
    case ModeRotation::minus:
        return "minus";
    case ModeRotation::resonant:
        return "resonant";
    }
    return "?";
}

std::vector<HarmonicMode> harmonic_modes(const OscillatorParams& params, double epsilon, OmegaConvention conv) {
    params.validate();
    if (params.T % 2 == 0)
        throw std::invalid_argument("harmonic_modes: T must be odd");
    if (epsilon < 0.0)
        throw std::invalid_argument("harmonic_modes: epsilon must be non-negative");
    const int M = (params.T - 1) / 2;
    const cplx mu(params.mu, epsilon);
    std::vector<HarmonicMode> modes;
    auto make = [&](int k, bool sine) {
        HarmonicMode h;
        h.k = k;
        h.sine = sine;
        h.s = harmonic_sk(mu, params.kappa, params.delta, params.T, k, conv);
        const double scale =
            2.0 * params.mu / params.delta * (1.0 - std::cos(mode_frequency(k, params.T, conv))) +
            params.kappa * params.delta;
        if (std::abs(h.s.real()) <= 1e-10 * scale)
            h.rotation = ModeRotation::resonant;
        else
            h.rotation = h.s.real() > 0.0 ? ModeRotation::plus : ModeRotation::minus;
        if (std::abs(h.s) == 0.0)
            throw NumericError(fmt::format("harmonic mode {} has s = 0; the integral diverges", k));
        // exp(i s x^2) with x = e^{i phase} y is exp(-|s| y^2)
        h.phase = std::numbers::pi / 4.0 - std::arg(h.s) / 2.0;
        h.variance = 1.0 / (2.0 * std::abs(h.s));
        if (h.rotation == ModeRotation::resonant && !(h.s.imag() > 0.0))
            throw CheckError(fmt::format("resonant mode {} needs a positive imaginary mass part", k));
        return h;
    };
    for (int k = 0; k <= M; ++k)
        modes.push_back(make(k, false));
    for (int k = 1; k <= M; ++k)
        modes.push_back(make(k, true));
    return modes;
}

int resonant_count(const std::vector<HarmonicMode>& modes) {
    std::vector<int> ks;
    for (const auto& h : modes)
        if (h.rotation == ModeRotation::resonant && std::find(ks.begin(), ks.end(), h.k) == ks.end())
            ks.push_back(h.k);
    return static_cast<int>(ks.size());
}

std::vector<cplx> fourier_synthesis(std::span<const cplx> c) {
    const std::size_t T = c.size();
    if (T % 2 == 0)
        throw std::invalid_argument("fourier_synthesis: need 2M + 1 coefficients");
    const std::size_t M = (T - 1) / 2;
    std::vector<cplx> x(T);
    for (std::size_t t = 1; t <= T; ++t) {
        cplx v = c[0];
        for (std::size_t k = 1; k <= M; ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(T);
            v += c[k] * std::cos(w) + c[M + k] * std::sin(w);
        }
        x[t - 1] = v;
    }
    return x;
}

std::vector<cplx> fourier_analysis(std::span<const cplx> x) {
    const std::size_t T = x.size();
    if (T % 2 == 0)
        throw std::invalid_argument("fourier_analysis: need an odd number of sites");
    const std::size_t M = (T - 1) / 2;
    std::vector<cplx> c(T, 0.0);
    const double Td = static_cast<double>(T);
    for (std::size_t t = 1; t <= T; ++t) {
        c[0] += x[t - 1] / Td;
        for (std::size_t k = 1; k <= M; ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k * t) / Td;
            c[k] += 2.0 / Td * x[t - 1] * std::cos(w);
            c[M + k] += 2.0 / Td * x[t - 1] * std::sin(w);
        }
    }
    return c;
}

TrajectoryEnsemble harmonic_ensemble(const OscillatorParams& params, double epsilon, std::size_t n,
                                     std::uint64_t seed, OmegaConvention conv, Exec exec) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("harmonic_ensemble: epsilon must be positive");
    TrajectoryEnsemble e;
    e.T = params.T;
    e.seed = seed;
    e.count = n;
    e.modes = harmonic_modes(params, epsilon, conv);
    const int res = resonant_count(e.modes);
    if (res != 1)
        throw CheckError(fmt::format("harmonic_ensemble: expected exactly one resonant mode, found {}", res));
    const auto T = static_cast<std::size_t>(params.T);
    e.coefficients.resize(n * T);
    e.trajectories.resize(n * T);
    std::vector<cplx> rot(T);
    std::vector<double> sd(T);
    for (std::size_t j = 0; j < T; ++j) {
        rot[j] = std::polar(1.0, e.modes[j].phase);
        sd[j] = std::sqrt(e.modes[j].variance);
    }
    auto one = [&](std::size_t i) {
        SampleStream rng(seed, i, 1);
        cplx* c = e.coefficients.data() + i * T;
        for (std::size_t j = 0; j < T; ++j)
            c[j] = rot[j] * (sd[j] * rng.normal());
        auto x = fourier_synthesis(std::span<const cplx>(c, T));
        std::copy(x.begin(), x.end(), e.trajectories.begin() + static_cast<std::ptrdiff_t>(i * T));
    };
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i)
            one(i);
    } else {
        const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < nn; ++i)
            one(static_cast<std::size_t>(i));
    }
    return e;
}

std::vector<double> real_power_spectrum(const TrajectoryEnsemble& e) {
    const auto T = static_cast<std::size_t>(e.T);
    const std::size_t M = (T - 1) / 2;
    std::vector<double> p(M + 1, 0.0);
    if (e.count == 0)
        return p;
    for (std::size_t i = 0; i < e.count; ++i) {
        const cplx* c = e.coefficients.data() + i * T;
        p[0] += std::norm(c[0]);
        for (std::size_t k = 1; k <= M; ++k)
            p[k] += std::norm(c[k]) + std::norm(c[M + k]);
    }
    for (double& v : p)
        v /= static_cast<double>(e.count);
    return p;
}

double mode_amplitude(const TrajectoryEnsemble& e, int k) {
    auto p = real_power_spectrum(e);
    if (k < 0 || static_cast<std::size_t>(k) >= p.size())
        throw std::out_of_range("mode_amplitude: mode index out of range");
    return std::sqrt(p[static_cast<std::size_t>(k)]);
}

void write_trajectories_csv(const TrajectoryEnsemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "sample,t,re,im\n";
    const auto T = static_cast<std::size_t>(e.T);
    for (std::size_t i = 0; i < e.count; ++i)
        for (std::size_t t = 0; t < T; ++t) {
            const cplx x = e.trajectories[i * T + t];
            out << fmt::format("{},{},{:.17g},{:.17g}\n", i, t + 1, x.real(), x.imag());
        }
}

} // namespace posrep
