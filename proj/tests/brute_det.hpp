#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

// Leibniz-formula determinant of a Hankel matrix, exact rational arithmetic.
// Deliberately naive: an oracle independent of the elimination in the library.
inline boost::multiprecision::cpp_rational brute_hankel_det(std::span<const double> s, int n) {
    using R = boost::multiprecision::cpp_rational;
    const int k = n / 2 + 1;
    const int off = n % 2;
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    R total = 0;
    do {
        int inversions = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
        R term = 1;
        for (int i = 0; i < k; ++i)
            term *= R(s[static_cast<std::size_t>(i + perm[static_cast<std::size_t>(i)] + off)]);
        total += inversions % 2 ? -term : term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}
