#include "excitonium/hierarchy.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace excitonium {

namespace {

// C(n, k) with saturation at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t num = n - k + i;
        if (r > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
        r = r * num / i;
    }
    return r;
}

}  // namespace

std::size_t Hierarchy::count(int modes, int depth) {
    if (modes < 0 || depth < 0) return 0;
    return binomial(static_cast<std::size_t>(modes + depth), static_cast<std::size_t>(depth));
}

Hierarchy::Hierarchy(int n_sites, int n_matsubara, int max_depth, std::size_t max_ados)
    : n_sites_(n_sites), terms_per_site_(n_matsubara + 1), n_modes_(n_sites * (n_matsubara + 1)),
      max_depth_(max_depth) {
    if (n_sites < 1) throw std::invalid_argument("hierarchy needs at least one site");
    if (n_matsubara < 0) throw std::invalid_argument("hierarchy needs n_matsubara >= 0");
    if (max_depth < 0) throw std::invalid_argument("hierarchy depth must be >= 0");
    if (max_depth > 255) throw std::invalid_argument("hierarchy depth above 255 is not supported");

    size_ = count(n_modes_, max_depth_);
    if (size_ > max_ados) {
        throw std::length_error("hierarchy with " + std::to_string(n_modes_) + " modes and depth " +
                                std::to_string(max_depth_) + " needs " + std::to_string(size_) +
                                " auxiliary operators, above the limit of " + std::to_string(max_ados));
    }

    binom_.assign(n_modes_ + max_depth_ + 1, std::vector<std::size_t>(max_depth_ + 2, 0));
    for (std::size_t a = 0; a < binom_.size(); ++a) {
        for (std::size_t b = 0; b < binom_[a].size(); ++b) binom_[a][b] = binomial(a, b);
    }

    occupations_.assign(size_ * n_modes_, 0);
    depths_.assign(size_, 0);

    // Enumerate depth by depth in lexicographic order (ascending vectors).
    std::vector<int> n(n_modes_, 0);
    std::size_t ordinal = 0;
    for (int d = 0; d <= max_depth_; ++d) {
        // First composition of d in lex order: everything in the last mode.
        std::fill(n.begin(), n.end(), 0);
        n.back() = d;
        while (true) {
            for (int m = 0; m < n_modes_; ++m) occupations_[ordinal * n_modes_ + m] = static_cast<std::uint8_t>(n[m]);
            depths_[ordinal] = static_cast<std::uint8_t>(d);
            ++ordinal;
            // Next composition in lex order: find rightmost position p < last
            // that can be incremented with mass taken from the tail.
            int tail = n.back();
            int p = n_modes_ - 2;
            while (p >= 0 && tail == 0) {
                tail += n[p];
                --p;
            }
            // tail now is sum of n[p+1..]; need tail > 0 to move one unit to p.
            if (p < 0) break;
            ++n[p];
            --tail;
            for (int m = p + 1; m < n_modes_; ++m) n[m] = 0;
            n.back() = tail;
        }
    }
    if (ordinal != size_) throw std::logic_error("hierarchy enumeration count mismatch");

    raise_.assign(size_ * n_modes_, none);
    lower_.assign(size_ * n_modes_, none);
    std::vector<int> probe(n_modes_);
    for (std::size_t o = 0; o < size_; ++o) {
        for (int m = 0; m < n_modes_; ++m) probe[m] = occupations_[o * n_modes_ + m];
        for (int m = 0; m < n_modes_; ++m) {
            if (depths_[o] < max_depth_) {
                ++probe[m];
                raise_[o * n_modes_ + m] = static_cast<std::int32_t>(rank(probe));
                --probe[m];
            }
            if (probe[m] > 0) {
                --probe[m];
                lower_[o * n_modes_ + m] = static_cast<std::int32_t>(rank(probe));
                ++probe[m];
            }
        }
    }
}

std::size_t Hierarchy::compositions(int parts, int total) const {
    if (parts <= 0) return total == 0 ? 1 : 0;
    return binom_[total + parts - 1][total];
}

std::size_t Hierarchy::rank(std::span<const int> occupation) const {
    if (static_cast<int>(occupation.size()) != n_modes_) throw std::out_of_range("multi-index has wrong length");
    int d = 0;
    for (int v : occupation) {
        if (v < 0) throw std::out_of_range("multi-index has a negative occupation");
        d += v;
    }
    if (d > max_depth_) throw std::out_of_range("multi-index deeper than the hierarchy");

    std::size_t r = d > 0 ? count(n_modes_, d - 1) : 0;
    int remaining = d;
    for (int i = 0; i + 1 < n_modes_; ++i) {
        // Vectors that agree on positions < i and have a smaller value at i.
        for (int v = 0; v < occupation[i]; ++v) r += compositions(n_modes_ - 1 - i, remaining - v);
        remaining -= occupation[i];
    }
    return r;
}

}  // namespace excitonium
