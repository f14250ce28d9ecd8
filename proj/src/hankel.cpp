#include "posrep/hankel.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "posrep/error.hpp"

namespace posrep {

namespace {

using Big = boost::multiprecision::cpp_bin_float_100;

// Gaussian elimination over the rationals.
Rational det_exact(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0)
            ++piv;
        if (piv == n)
            return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0)
                continue;
            Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

std::vector<std::vector<Rational>> hankel_matrix(std::span<const double> s, int n) {
    const int k = n / 2;
    const int off = n % 2;
    std::vector<std::vector<Rational>> h(static_cast<std::size_t>(k + 1),
                                         std::vector<Rational>(static_cast<std::size_t>(k + 1)));
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
            h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(s[static_cast<std::size_t>(i + j + off)]);
    return h;
}

} // namespace

int hankel_required_length(int n) { return n + 1; }

Rational hankel_det_exact(std::span<const double> s, int n) {
    if (n < 0)
        throw std::invalid_argument("hankel_det: n must be >= 0");
    if (static_cast<int>(s.size()) < hankel_required_length(n))
        throw std::invalid_argument(fmt::format("hankel_det: H^{} needs s_0..s_{}, got {} values", n, n, s.size()));
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i)
        if (!std::isfinite(s[i]))
            throw std::invalid_argument("hankel_det: non-finite moment");
    return det_exact(hankel_matrix(s, n));
}

double hankel_det(std::span<const double> s, int n) { return hankel_det_exact(s, n).convert_to<double>(); }

MomentSequence::MomentSequence(std::vector<double> values) : s_(std::move(values)) {
    if (s_.empty() || s_[0] != 1.0)
        throw std::invalid_argument("MomentSequence: s_0 must be 1");
    for (double v : s_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("MomentSequence: values must be positive and finite");
    for (int n = 0; n <= max_index(); ++n)
        if (hankel_det_exact(s_, n) <= 0)
            throw std::invalid_argument(fmt::format("MomentSequence: det(H^{}) is not positive", n));
}

MomentSequence complete_sequence(std::span<const double> lower) {
    if (lower.empty())
        throw std::invalid_argument("complete_sequence: need at least l_0");
    if (!(lower[0] <= 1.0) || lower[0] < 0.0)
        throw std::invalid_argument("complete_sequence: l_0 must lie in [0, 1]");
    for (double l : lower)
        if (!(l >= 0.0) || !std::isfinite(l))
            throw std::invalid_argument("complete_sequence: lower bounds must be finite and non-negative");

    std::vector<double> s{1.0};
    for (std::size_t next = 1; next < lower.size(); ++next) {
        const int n = static_cast<int>(next);
        // det(H^n) = det(H^{n-2}) s_n + det(H^n)|_{s_n = 0}; H^{-1} is empty.
        s.push_back(0.0);
        Rational rest = hankel_det_exact(s, n);
        Rational coeff = n >= 2 ? hankel_det_exact(s, n - 2) : Rational(1);
        if (coeff <= 0)
            throw std::logic_error("complete_sequence: leading minor lost positivity");
        Rational b = -rest / coeff;
        Rational v = std::max(Rational(lower[next]), b);
        Rational chosen = 2 * v + 1;
        double d = chosen.convert_to<double>();
        if (!std::isfinite(d))
            throw NumericError("complete_sequence: moments overflow double precision");
        s.back() = d;
    }
    return MomentSequence(std::move(s));
}

DiscreteMeasure representing_measure(const MomentSequence& seq, int n) {
    if (n < 1)
        throw std::invalid_argument("representing_measure: need at least one node");
    if (seq.max_index() < 2 * n - 1)
        throw std::invalid_argument(
            fmt::format("representing_measure: {} nodes need s_0..s_{}, sequence stops at s_{}", n, 2 * n - 1,
                        seq.max_index()));

    auto s = [&](int k) { return Big(seq[k]); };
    const auto N = static_cast<std::size_t>(n);

    // Upper Cholesky factor R of M_{ij} = s_{i+j} (0 <= i, j < n) plus the
    // extra column r_{i,n} built from s_{i+n}.
    std::vector<std::vector<Big>> r(N, std::vector<Big>(N + 1, Big(0)));
    for (std::size_t i = 0; i < N; ++i) {
        Big d = s(static_cast<int>(2 * i));
        for (std::size_t k = 0; k < i; ++k)
            d -= r[k][i] * r[k][i];
        if (d <= 0 || d < Big(1e-80) * s(static_cast<int>(2 * i)))
            throw NumericError(fmt::format(
                "representing_measure: Hankel system numerically singular at order {}; use fewer nodes", i));
        r[i][i] = sqrt(d);
        for (std::size_t j = i + 1; j <= N; ++j) {
            Big v = s(static_cast<int>(i + j));
            for (std::size_t k = 0; k < i; ++k)
                v -= r[k][i] * r[k][j];
            r[i][j] = v / r[i][i];
        }
    }

    std::vector<Big> alpha(N), beta(N, Big(0)); // beta[j] couples j-1 and j
    for (std::size_t j = 0; j < N; ++j) {
        alpha[j] = r[j][j + 1] / r[j][j] - (j ? r[j - 1][j] / r[j - 1][j - 1] : Big(0));
        if (j)
            beta[j] = r[j][j] / r[j - 1][j - 1];
    }

    // Sturm count: eigenvalues of the Jacobi matrix below x.
    auto count_below = [&](const Big& x) {
        int c = 0;
        Big d = alpha[0] - x;
        const Big tiny = Big(1e-90);
        for (std::size_t j = 0;; ++j) {
            if (d == 0)
                d = tiny;
            if (d < 0)
                ++c;
            if (j + 1 == N)
                break;
            d = alpha[j + 1] - x - beta[j + 1] * beta[j + 1] / d;
        }
        return c;
    };

    Big lo = alpha[0], hi = alpha[0];
    for (std::size_t j = 0; j < N; ++j) {
        Big rad = (j ? abs(beta[j]) : Big(0)) + (j + 1 < N ? abs(beta[j + 1]) : Big(0));
        lo = std::min(lo, Big(alpha[j] - rad));
        hi = std::max(hi, Big(alpha[j] + rad));
    }

    std::vector<Big> x(N);
    for (std::size_t i = 0; i < N; ++i) {
        Big a = lo, b = hi;
        for (int it = 0; it < 400; ++it) {
            Big mid = (a + b) / 2;
            if (count_below(mid) > static_cast<int>(i))
                b = mid;
            else
                a = mid;
            if (b - a <= Big(1e-60) * (abs(a) + abs(b)))
                break;
        }
        x[i] = (a + b) / 2;
    }

    // Christoffel weights: w_i = s_0 / sum_k p_k(x_i)^2 with orthonormal p_k.
    DiscreteMeasure out;
    for (std::size_t i = 0; i < N; ++i) {
        Big pprev = 0, p = 1, sum = 1;
        for (std::size_t k = 0; k + 1 < N; ++k) {
            Big pnext = ((x[i] - alpha[k]) * p - (k ? beta[k] * pprev : Big(0))) / beta[k + 1];
            pprev = p;
            p = pnext;
            sum += p * p;
        }
        out.nodes.push_back(x[i].convert_to<double>());
        out.weights.push_back((s(0) / sum).convert_to<double>());
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (!(out.nodes[i] >= 0.0))
            throw NumericError("representing_measure: negative node; sequence is not a Stieltjes sequence");
        if (!(out.weights[i] > 0.0))
            throw NumericError("representing_measure: non-positive weight");
        if (i && !(out.nodes[i] > out.nodes[i - 1]))
            throw NumericError("representing_measure: nodes coincide in double precision; use fewer nodes");
    }
    return out;
}

} // namespace posrep
