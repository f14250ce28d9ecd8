#include "posrep/multi_index.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace posrep {

MultiIndex::MultiIndex(std::vector<int> exponents) : m_(std::move(exponents)) {
    if (m_.empty())
        throw std::invalid_argument("MultiIndex: dimension must be >= 1");
    for (int e : m_)
        if (e < 0)
            throw std::invalid_argument("MultiIndex: negative exponent");
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex MultiIndex::zero(int dimension) {
    return MultiIndex(std::vector<int>(static_cast<std::size_t>(dimension), 0));
}

int MultiIndex::degree() const { return std::accumulate(m_.begin(), m_.end(), 0); }

std::string MultiIndex::str() const {
    std::string out;
    for (std::size_t j = 0; j < m_.size(); ++j) {
        if (j)
            out += ':';
        out += std::to_string(m_[j]);
    }
    return out;
}

MultiIndex MultiIndex::parse(std::string_view text) {
    std::vector<int> m;
    while (true) {
        auto colon = text.find(':');
        auto field = text.substr(0, colon);
        int v = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size())
            throw std::invalid_argument("MultiIndex: cannot parse '" + std::string(field) + "'");
        m.push_back(v);
        if (colon == std::string_view::npos)
            break;
        text.remove_prefix(colon + 1);
    }
    return MultiIndex(std::move(m));
}

std::uint64_t count_of_degree(int N, int d) {
    // C(d + N - 1, N - 1)
    std::uint64_t c = 1;
    for (int i = 1; i < N; ++i)
        c = c * static_cast<std::uint64_t>(d + i) / static_cast<std::uint64_t>(i);
    return c;
}

namespace {

void fill_degree(int N, int remaining, int pos, std::vector<int>& cur, std::vector<MultiIndex>& out) {
    if (pos == N - 1) {
        cur[static_cast<std::size_t>(pos)] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[static_cast<std::size_t>(pos)] = e;
        fill_degree(N, remaining - e, pos + 1, cur, out);
    }
}

} // namespace

std::vector<MultiIndex> multi_indices_up_to(int N, int D) {
    if (N < 1)
        throw std::invalid_argument("multi_indices_up_to: N must be >= 1");
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<std::size_t>(N), 0);
    for (int d = 0; d <= D; ++d)
        fill_degree(N, d, 0, cur, out);
    return out;
}

} // namespace posrep
