#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "posrep/error.hpp"
#include "posrep/hankel.hpp"
#include "posrep/tconstruct.hpp"

using namespace posrep;

namespace {

// root of 3 - 2 (x/(x-1))^N by bisection, independent of the closed form
double threshold_by_bisection(int N) {
    double lo = 1.0 + 1e-12, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (3.0 - 2.0 * std::pow(mid / (mid - 1.0), N) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Fourier coefficient (1/(2pi)^N) int s(theta) e^{i m.theta} on a uniform
// grid; exact for trigonometric polynomials of degree below the grid size.
cplx fourier_coefficient(const AngularSeries& s, const MultiIndex& m, int per_dim) {
    const int N = s.dimension();
    long total = 1;
    for (int j = 0; j < N; ++j)
        total *= per_dim;
    std::vector<double> th(static_cast<std::size_t>(N));
    cplx acc = 0.0;
    for (long p = 0; p < total; ++p) {
        long f = p;
        double phase = 0.0;
        for (int j = 0; j < N; ++j) {
            th[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * static_cast<double>(f % per_dim) / per_dim;
            phase += m[j] * th[static_cast<std::size_t>(j)];
            f /= per_dim;
        }
        acc += s.evaluate(th) * std::polar(1.0, phase);
    }
    return acc / static_cast<double>(total);
}

ComplexMomentTable gaussian_table(std::vector<double> a, int D) {
    return build_moment_table(ComplexWeightSpec::gaussian_phase(std::move(a)), D);
}

} // namespace

TEST_CASE("positivity threshold") {
    CHECK(lambda_min(1) == 3.0);
    CHECK(lambda_min(2) == doctest::Approx(5.44948974278317809819728407471).epsilon(1e-14));
    CHECK(lambda_min(3) == doctest::Approx(7.91016987931556034275774570432).epsilon(1e-14));
    for (int N = 1; N <= 10; ++N) {
        CHECK(std::abs(lambda_min(N) - threshold_by_bisection(N)) <= 1e-12 * lambda_min(N));
        CHECK(std::abs(s_lower_bound(lambda_min(N), N)) < 1e-12);
        CHECK(s_lower_bound(1.05 * lambda_min(N), N) > 0.0);
    }
    CHECK_THROWS(lambda_min(0));
}

TEST_CASE("tail bound") {
    CHECK(tail_bound(3.0, 1, 10) == doctest::Approx(std::pow(3.0, -10)).epsilon(1e-13));
    CHECK(tail_bound(3.15, 1, 4) == doctest::Approx(0.0094482052804120813475).epsilon(1e-13));
    CHECK(tail_bound(5.45, 2, 12) == doctest::Approx(9.31012809632756884e-9).epsilon(1e-12));
    CHECK(tail_bound(8.0, 3, 5) == doctest::Approx(0.00025428349353134110787).epsilon(1e-12));
    for (int D = 0; D < 20; ++D)
        CHECK(tail_bound(4.0, 2, D + 1) < tail_bound(4.0, 2, D));
}

TEST_CASE("adaptive cutoff is the smallest admissible one") {
    for (int N = 1; N <= 4; ++N) {
        const double lam = 1.05 * lambda_min(N);
        const int D = adaptive_cutoff(lam, N);
        const double target = 0.25 * s_lower_bound(lam, N);
        CHECK(tail_bound(lam, N, D) < target);
        if (D > 0)
            CHECK(tail_bound(lam, N, D - 1) >= target);
    }
    CHECK_THROWS(adaptive_cutoff(2.9, 1));
}

TEST_CASE("lambda choice validation") {
    CHECK(LambdaChoice::with_margin(1).lambda == doctest::Approx(3.15));
    CHECK_THROWS(LambdaChoice::fixed(2, 5.0, 1.0));
    CHECK_NOTHROW(LambdaChoice::fixed(2, 6.0, 1.05));
    CHECK_THROWS(LambdaChoice::fixed(2, 5.6, 1.05));
}

TEST_CASE("angular coefficients") {
    auto t = gaussian_table({1.0}, 4);
    auto model = RadialMomentModel::iid(RadialModel1D::half_gaussian(), 1);
    auto s = build_angular(t, model, LambdaChoice::fixed(1, 3.0), 4);
    CHECK(std::abs(s.coefficient(MultiIndex{2}) - cplx(0.0, 1.0 / 18.0)) < 1e-11);
    CHECK(s.coefficient(MultiIndex{1}) == cplx(0.0));
    CHECK(s.coefficient(MultiIndex{0}) == cplx(1.0));
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(s.coefficients()[i]) <= std::pow(3.0, -s.indices()[i].degree()) * (1.0 + 1e-12));
}

TEST_CASE("coefficients above the cap are refused") {
    CHECK_THROWS_AS(AngularSeries(1, 1, 3.0, {MultiIndex{0}, MultiIndex{1}}, {1.0, 0.34}), CheckError);
    CHECK_NOTHROW(AngularSeries(1, 1, 3.0, {MultiIndex{0}, MultiIndex{1}}, {1.0, 1.0 / 3.0}));
    CHECK_THROWS(AngularSeries(1, 1, 3.0, {MultiIndex{0}, MultiIndex{1}}, {0.9, 0.1}));
}

TEST_CASE("construction refuses an undominated table") {
    auto t = gaussian_table({1.0}, 6);
    auto delta = RadialMomentModel::iid(RadialModel1D::delta(1.0), 1);
    CHECK_THROWS_AS(build_angular(t, delta, LambdaChoice::with_margin(1), 6), CheckError);
}

TEST_CASE("Fourier coefficients of s recover gamma") {
    for (int N = 1; N <= 2; ++N) {
        std::vector<double> a(static_cast<std::size_t>(N), 1.0);
        a[0] = 2.0;
        const int D = 6;
        auto t = build_moment_table(ComplexWeightSpec::quartic_phase(a), D);
        auto model = RadialMomentModel::iid(RadialModel1D::half_gaussian(), N);
        auto s = build_angular(t, model, LambdaChoice::with_margin(N), D);
        for (const auto& m : multi_indices_up_to(N, D)) {
            if (m.is_zero())
                continue;
            cplx got = fourier_coefficient(s, m, 2 * D + 3);
            CHECK(std::abs(got - s.coefficient(m)) < 1e-14);
        }
    }
}

TEST_CASE("s stays between its bounds") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int N = 1; N <= 3; ++N) {
        const double lam = 1.05 * lambda_min(N);
        const int D = adaptive_cutoff(lam, N);
        // extreme coefficients gamma_m = lambda^-|m| e^{i phi_m}
        std::vector<MultiIndex> idx;
        std::vector<cplx> g;
        for (const auto& m : multi_indices_up_to(N, D)) {
            idx.push_back(m);
            g.push_back(m.is_zero() ? cplx(1.0) : std::polar(std::pow(lam, -m.degree()), u(gen)));
        }
        AngularSeries s(N, D, lam, idx, g);
        const double lo = s_lower_bound(lam, N) - s.tail(), hi = s_upper_envelope(lam, N) + s.tail();
        std::vector<double> th(static_cast<std::size_t>(N));
        for (int i = 0; i < 2000; ++i) {
            for (auto& v : th)
                v = u(gen);
            double v = s_eval(s, th);
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
        auto cert = certify_positivity(s, 10000);
        CHECK(cert.certified);
        CHECK(cert.positive);
        auto serial = certify_positivity(s, 10000, Exec::serial);
        CHECK(serial.grid_min == cert.grid_min);
        CHECK(serial.grid_max == cert.grid_max);
    }
}

TEST_CASE("f_lambda") {
    CHECK(std::abs(f_lambda(RadialModel1D::delta(1.0), 3.0, 1.0) - cplx(1.5)) < 1e-11);
    CHECK_THROWS_AS(f_lambda(RadialModel1D::delta(1.0), 3.0, 3.0), NumericError);
    CHECK(std::abs(f_lambda(RadialModel1D::exponential(), 3.0, 2.0) - std::exp(2.0 / 3.0)) < 1e-9);
    CHECK(std::abs(f_lambda(RadialModel1D::half_gaussian(), 3.0, 0.5) - 1.2398435344472637212) < 1e-9);
    // complex argument: geometric series 1/(1 - y/(lambda B))
    cplx y(0.5, 1.0);
    CHECK(std::abs(f_lambda(RadialModel1D::delta(2.0), 3.0, y) - 1.0 / (1.0 - y / 6.0)) < 1e-11);
}

TEST_CASE("round trip is exact at the cutoff") {
    for (int N = 1; N <= 2; ++N) {
        auto t = gaussian_table(std::vector<double>(static_cast<std::size_t>(N), 1.0), 8);
        auto dens = construct_t(t, RadialMomentModel::iid(RadialModel1D::half_gaussian(), N),
                                LambdaChoice::with_margin(N), 8);
        for (const auto& m : multi_indices_up_to(N, 8)) {
            cplx want = t.at(m), got = t_moment_roundtrip(dens, m);
            if (want == cplx(0.0))
                CHECK(got == cplx(0.0));
            else
                CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
        }
        std::vector<int> above(static_cast<std::size_t>(N), 0);
        above[0] = 9;
        CHECK_THROWS(t_moment_roundtrip(dens, MultiIndex(above)));
    }
}

TEST_CASE("t density integrates to one and reproduces a moment") {
    auto t = gaussian_table({1.0}, 4);
    auto dens = construct_t(t, RadialMomentModel::iid(RadialModel1D::half_gaussian(), 1), LambdaChoice::with_margin(1), 4);
    // polar quadrature: midpoint in r on [0, 12 lambda], uniform in theta
    const int nr = 6000, nt = 64;
    const double rmax = 12.0 * dens.lambda(), hr = rmax / nr, ht = 2.0 * std::numbers::pi / nt;
    double mass = 0.0;
    cplx m2 = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = (i + 0.5) * hr;
        for (int k = 0; k < nt; ++k) {
            const cplx z = std::polar(r, k * ht);
            const double w = dens.density(std::span<const cplx>(&z, 1)) * r * hr * ht;
            mass += w;
            m2 += w * z * z;
        }
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(m2 - cplx(0.0, 0.5)) < 1e-7);
}

TEST_CASE("completed-sequence models give exact round trips") {
    auto t = build_moment_table(ComplexWeightSpec::quartic_phase({1.0}), 9);
    std::vector<double> lower;
    for (int m = 0; m <= 9; ++m)
        lower.push_back(std::abs(t.at(MultiIndex{m})));
    auto meas = representing_measure(complete_sequence(lower), 5);
    auto model = RadialMomentModel::iid(RadialModel1D(meas), 1);
    auto dens = construct_t(t, model, LambdaChoice::with_margin(1), 8);
    for (int m = 0; m <= 8; ++m) {
        cplx want = t.at(MultiIndex{m}), got = t_moment_roundtrip(dens, MultiIndex{m});
        CHECK(std::abs(got - want) <= 1e-12 * std::max(std::abs(want), 1e-300));
    }
}
