#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "posrep/radial.hpp"

namespace posrep {

using Rational = boost::multiprecision::cpp_rational;

/// Moment sequence s_0 = 1, s_1, ..., s_K with every Hankel determinant
/// (both parities) strictly positive.
class MomentSequence {
  public:
    /// Validates s_0 = 1, positivity and det(H^n) > 0 for n <= K.
    explicit MomentSequence(std::vector<double> values);

    int max_index() const { return static_cast<int>(s_.size()) - 1; }
    double operator[](int k) const { return s_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& values() const { return s_; }

  private:
    std::vector<double> s_;
};

/// Exact determinant of H^n: H^{2k}_{ij} = s_{i+j}, H^{2k+1}_{ij} = s_{i+j+1},
/// 0 <= i, j <= k. Every double is a dyadic rational, so the elimination
/// runs in exact rational arithmetic.
Rational hankel_det_exact(std::span<const double> s, int n);

/// hankel_det_exact rounded to double.
double hankel_det(std::span<const double> s, int n);

/// Shortest sequence length needed for H^n.
int hankel_required_length(int n);

/// Smallest moment sequence dominating `lower` (lower[0] <= 1) built by the
/// inductive completion: det(H^{k+1}) is linear in s_{k+1} with the positive
/// coefficient det(H^{k-1}); its root b is the bound and s_{k+1} is set to
/// 2 max(lower_{k+1}, b) + 1.
MomentSequence complete_sequence(std::span<const double> lower);

/// n-point discrete measure reproducing s_0 .. s_{2n-1}: Jacobi matrix from
/// the Cholesky factor of the moment matrix, nodes by Sturm bisection and
/// weights from the Christoffel function, all in 100-digit arithmetic.
DiscreteMeasure representing_measure(const MomentSequence& seq, int nodes);

} // namespace posrep
