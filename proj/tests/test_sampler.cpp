#include <doctest.h>

#include <cmath>
#include <numbers>

#include <omp.h>

#include "posrep/error.hpp"
#include "posrep/sampler.hpp"

using namespace posrep;

TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("sample streams are reproducible and distinct") {
    SampleStream a(7, 3), b(7, 3), c(7, 4), d(8, 3), e(7, 3, 1);
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != d.next_u64());
    CHECK(va != e.next_u64());
    SampleStream u(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST_CASE("radial sampler") {
    const int n = 200000;
    SUBCASE("half-normal at scale 2") {
        RadialSampler s(RadialMomentModel::iid(RadialModel1D::half_gaussian(), 1), 2.0);
        double m1 = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            SampleStream rng(5, static_cast<std::uint64_t>(i));
            double r;
            s.draw(rng, &r);
            m1 += r;
            m2 += r * r;
        }
        m1 /= n;
        m2 /= n;
        const double mean = 2.0 * 0.79788456080286535588, var = 4.0 - mean * mean;
        CHECK(std::abs(m1 - mean) < 4.0 * std::sqrt(var / n));
        CHECK(std::abs(m2 - 4.0) < 4.0 * std::sqrt(32.0 / n));  // Var r^2 = 4^2 * 2
    }
    SUBCASE("point mass and shift") {
        RadialSampler s(RadialMomentModel({RadialModel1D::delta(1.5),
                                           shift_model(RadialModel1D::delta(1.0), 0.5)}),
                        3.0);
        SampleStream rng(1, 0);
        double r[2];
        s.draw(rng, r);
        CHECK(r[0] == 4.5);
        CHECK(r[1] == 4.5);
    }
    SUBCASE("discrete measure frequencies") {
        RadialSampler s(RadialMomentModel::iid(RadialModel1D::discrete({1.0, 2.0}, {1.0, 3.0}), 1), 1.0);
        int ones = 0;
        for (int i = 0; i < n; ++i) {
            SampleStream rng(9, static_cast<std::uint64_t>(i));
            double r;
            s.draw(rng, &r);
            REQUIRE((r == 1.0 || r == 2.0));
            ones += r == 1.0;
        }
        CHECK(std::abs(ones / double(n) - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / n));
    }
}

TEST_CASE("angular draws reproduce the Fourier coefficients") {
    const double lam = 3.15;
    AngularSeries s(1, 3, lam, {MultiIndex{0}, MultiIndex{1}, MultiIndex{2}, MultiIndex{3}},
                    {1.0, std::polar(0.9 / lam, 0.3), std::polar(0.8 / (lam * lam), -1.0), std::polar(0.5 / (lam * lam * lam), 2.0)});
    AngularSampler sampler(s);
    const int n = 200000;
    cplx acc[4] = {};
    double sq_re[4] = {}, sq_im[4] = {};
    for (int i = 0; i < n; ++i) {
        SampleStream rng(21, static_cast<std::uint64_t>(i));
        double th;
        sampler.draw(rng, &th);
        REQUIRE(th >= 0.0);
        REQUIRE(th < 2.0 * std::numbers::pi);
        for (int m = 1; m <= 3; ++m) {
            const cplx v = std::polar(1.0, m * th);
            acc[m] += v;
            sq_re[m] += v.real() * v.real();
            sq_im[m] += v.imag() * v.imag();
        }
    }
    for (int m = 1; m <= 3; ++m) {
        const cplx mean = acc[m] / double(n);
        const double se_re = std::sqrt((sq_re[m] / n - mean.real() * mean.real()) / n);
        const double se_im = std::sqrt((sq_im[m] / n - mean.imag() * mean.imag()) / n);
        CHECK(std::abs(mean.real() - s.coefficient(MultiIndex{m}).real()) < 3.0 * se_re);
        CHECK(std::abs(mean.imag() - s.coefficient(MultiIndex{m}).imag()) < 3.0 * se_im);
    }
}

TEST_CASE("angular sampler refuses a series that goes negative") {
    const double lam = 2.5;
    AngularSeries s(1, 3, lam, {MultiIndex{0}, MultiIndex{1}, MultiIndex{2}, MultiIndex{3}},
                    {1.0, -1.0 / lam, -1.0 / (lam * lam), -1.0 / (lam * lam * lam)});
    CHECK_THROWS_AS(AngularSampler{s}, CheckError);
}

TEST_CASE("parallel sampling and estimation match the serial reference bit for bit") {
    omp_set_num_threads(4);
    auto t = build_moment_table(ComplexWeightSpec::gaussian_phase({1.0, 2.0}), 6);
    auto dens = construct_t(t, RadialMomentModel::iid(RadialModel1D::half_gaussian(), 2), LambdaChoice::with_margin(2), 6);
    auto ser = sample_ensemble(dens, 20000, 99, Exec::serial);
    auto par = sample_ensemble(dens, 20000, 99, Exec::parallel);
    CHECK(ser.proposals == par.proposals);
    CHECK(ser.z == par.z);
    CHECK(ser.r == par.r);
    CHECK(ser.theta == par.theta);
    for (const auto& m : multi_indices_up_to(2, 4)) {
        auto a = estimate_moment(ser, m, Exec::serial);
        auto b = estimate_moment(par, m, Exec::parallel);
        CHECK(a.value == b.value);
        CHECK(a.se_re == b.se_re);
        CHECK(a.se_im == b.se_im);
    }
    CHECK(sample_ensemble(dens, 20000, 100).z != ser.z);
}

TEST_CASE("moment estimates on fixed points") {
    auto e = ComplexEnsemble::from_points(1, {cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0), cplx(0.0, -1.0)});
    auto m2 = estimate_moment(e, MultiIndex{2});
    CHECK(m2.value == cplx(0.0, 0.0));
    CHECK(m2.se_re == doctest::Approx(std::sqrt(4.0 / 3.0 / 4.0)));
    CHECK(m2.se_im == 0.0);
    auto m4 = estimate_moment(e, MultiIndex{4});
    CHECK(m4.value == cplx(1.0, 0.0));
    CHECK(m4.se_re == 0.0);

    std::map<MultiIndex, MomentEntry> entries{{MultiIndex{0}, {1.0}}, {MultiIndex{1}, {0.0}}, {MultiIndex{2}, {0.0}},
                                              {MultiIndex{3}, {0.0}}, {MultiIndex{4}, {1.0}}};
    auto good = verify_moments(e, ComplexMomentTable(1, 4, entries), 4, 4.0);
    CHECK(good.pass);
    entries[MultiIndex{4}] = {cplx(0.9, 0.0)};
    auto bad = verify_moments(e, ComplexMomentTable(1, 4, entries), 4, 4.0);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.worst);
    CHECK(*bad.worst == MultiIndex{4});
    CHECK(bad.worst_pull > 1e6);
}

TEST_CASE("Gaussian phase ensemble passes moment verification") {
    auto t = build_moment_table(ComplexWeightSpec::gaussian_phase({1.0}), 6);
    auto dens = construct_t(t, RadialMomentModel::iid(RadialModel1D::half_gaussian(), 1), LambdaChoice::with_margin(1), 6);
    auto e = sample_ensemble(dens, 100000, 2024);
    CHECK(e.acceptance_rate() > 0.5);
    auto v = verify_moments(e, t, 6, 4.0);
    CHECK(v.pass);
    CHECK(v.rows.size() == 7);
}
