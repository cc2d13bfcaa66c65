#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace excitonium {

/// Dense enumeration of every HEOM multi-index n (one occupation per
/// (site, expansion term) mode) with depth sum(n) <= max_depth.
///
/// Ordinals are assigned by depth, then lexicographically within a depth
/// (smaller leading occupations first). rank() is the closed-form inverse of
/// the enumeration, so index <-> ordinal is a bijection without a hash map.
/// Mode m = site * terms_per_site + term.
class Hierarchy {
public:
    static constexpr std::int32_t none = -1;
    static constexpr std::size_t default_max_ados = 4'000'000;

    Hierarchy(int n_sites, int n_matsubara, int max_depth, std::size_t max_ados = default_max_ados);

    /// Number of multi-indices with at most `depth` quanta over `modes` modes.
    static std::size_t count(int modes, int depth);

    int n_sites() const { return n_sites_; }
    int terms_per_site() const { return terms_per_site_; }
    int n_modes() const { return n_modes_; }
    int max_depth() const { return max_depth_; }
    std::size_t size() const { return size_; }

    int mode(int site, int term) const { return site * terms_per_site_ + term; }

    std::span<const std::uint8_t> index(std::size_t ordinal) const {
        return {occupations_.data() + ordinal * n_modes_, static_cast<std::size_t>(n_modes_)};
    }
    int depth(std::size_t ordinal) const { return depths_[ordinal]; }

    /// Ordinal of n + e_mode, or `none` beyond max_depth.
    std::int32_t raise(std::size_t ordinal, int mode) const { return raise_[ordinal * n_modes_ + mode]; }
    /// Ordinal of n - e_mode, or `none` when that occupation is zero.
    std::int32_t lower(std::size_t ordinal, int mode) const { return lower_[ordinal * n_modes_ + mode]; }

    /// Ordinal of an arbitrary multi-index; throws std::out_of_range if its
    /// depth exceeds max_depth or its length is wrong.
    std::size_t rank(std::span<const int> occupation) const;

private:
    int n_sites_;
    int terms_per_site_;
    int n_modes_;
    int max_depth_;
    std::size_t size_;
    std::vector<std::uint8_t> occupations_;
    std::vector<std::uint8_t> depths_;
    std::vector<std::int32_t> raise_;
    std::vector<std::int32_t> lower_;
    // binom_[a][b] = C(a, b) for the ranges ranking needs
    std::vector<std::vector<std::size_t>> binom_;

    std::size_t compositions(int parts, int total) const;
};

}  // namespace excitonium
