#include <doctest.h>

#include <cmath>

#include "brute_det.hpp"
#include "posrep/hankel.hpp"

using namespace posrep;

namespace {

std::vector<double> gaussian_magnitudes(int K) {
    std::vector<double> v;
    for (int m = 0; m <= K; ++m)
        v.push_back(std::abs(gaussian_moment(1.0, m)));
    return v;
}

} // namespace

TEST_CASE("Hankel determinants of small sequences") {
    std::vector<double> a{1, 1, 2};
    CHECK(hankel_det(a, 0) == 1.0);
    CHECK(hankel_det(a, 1) == 1.0);
    CHECK(hankel_det(a, 2) == 1.0);
    std::vector<double> f{1, 1, 2, 6, 24};
    CHECK(hankel_det(f, 4) == 4.0);
    for (int n = 0; n <= 4; ++n)
        CHECK(hankel_det_exact(f, n) == brute_hankel_det(f, n));
    CHECK(hankel_required_length(4) == 5);
    CHECK_THROWS(hankel_det(a, 3));
}

TEST_CASE("moment sequence validation") {
    CHECK_NOTHROW(MomentSequence({1, 1, 2, 6, 24}));
    CHECK_THROWS(MomentSequence({2, 1, 2}));
    CHECK_THROWS(MomentSequence({1, 1, 1}));  // det [[1,1],[1,1]] = 0
    CHECK_THROWS(MomentSequence({1, -1, 2}));
}

TEST_CASE("completion dominates its input and stays positive definite") {
    for (auto lower : {std::vector<double>{1, 0, 0, 0}, gaussian_magnitudes(8), gaussian_magnitudes(12),
                       std::vector<double>{0.5, 3, 0.1, 7, 2, 0, 40}}) {
        auto seq = complete_sequence(lower);
        REQUIRE(seq.max_index() == static_cast<int>(lower.size()) - 1);
        CHECK(seq[0] == 1.0);
        for (int k = 0; k <= seq.max_index(); ++k) {
            CHECK(seq[k] >= lower[static_cast<std::size_t>(k)]);
            CHECK(brute_hankel_det(seq.values(), k) > 0);
        }
    }
}

TEST_CASE("completion rejects an input above one at index zero") {
    std::vector<double> bad{1.5, 0.0};
    CHECK_THROWS(complete_sequence(bad));
}

TEST_CASE("representing measures") {
    auto point = representing_measure(MomentSequence({1, 2}), 1);
    REQUIRE(point.nodes.size() == 1);
    CHECK(point.nodes[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(point.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

    auto gauss = representing_measure(MomentSequence({1, 0.5, 1.0 / 3.0, 0.25}), 2);
    REQUIRE(gauss.nodes.size() == 2);
    CHECK(gauss.nodes[0] == doctest::Approx(0.5 - std::sqrt(3.0) / 6.0).epsilon(1e-13));
    CHECK(gauss.nodes[1] == doctest::Approx(0.5 + std::sqrt(3.0) / 6.0).epsilon(1e-13));
    CHECK(gauss.weights[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(gauss.weights[1] == doctest::Approx(0.5).epsilon(1e-13));

    auto seq = complete_sequence(gaussian_magnitudes(11));
    auto meas = representing_measure(seq, 6);
    for (std::size_t i = 0; i < meas.nodes.size(); ++i) {
        CHECK(meas.weights[i] > 0.0);
        CHECK(meas.nodes[i] >= 0.0);
    }
    for (int k = 0; k <= 11; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < meas.nodes.size(); ++i)
            sum += meas.weights[i] * std::pow(meas.nodes[i], k);
        CHECK(sum == doctest::Approx(seq[k]).epsilon(1e-10));
    }
    CHECK_THROWS(representing_measure(seq, 7));
}
