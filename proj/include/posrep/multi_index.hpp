#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace posrep {

/// Exponent vector (m_1, ..., m_N) of a monomial x_1^{m_1} ... x_N^{m_N}.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents);
    MultiIndex(std::initializer_list<int> exponents);

    static MultiIndex zero(int dimension);

    int dimension() const { return static_cast<int>(m_.size()); }
    int degree() const;
    bool is_zero() const { return degree() == 0; }
    int operator[](int j) const { return m_[static_cast<std::size_t>(j)]; }
    const std::vector<int>& exponents() const { return m_; }

    /// Colon separated form, e.g. "2:0".
    std::string str() const;
    static MultiIndex parse(std::string_view text);

    auto operator<=>(const MultiIndex&) const = default;

  private:
    std::vector<int> m_;
};

/// Number of multi-indices of dimension N with total degree exactly d.
std::uint64_t count_of_degree(int N, int d);

/// All multi-indices of dimension N with degree <= D, ordered by degree,
/// then lexicographically descending (x_1^d first).
std::vector<MultiIndex> multi_indices_up_to(int N, int D);

} // namespace posrep
