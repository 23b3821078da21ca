#pragma once

// Finite weighted ground space, its power-set algebra and the kernels built
// on the symmetric-difference measure.
//
// The ground space has M atoms with strictly positive weights. A FiniteSet is
// an indicator over those atoms; all integrals reduce to weighted sums.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "randset/error.hpp"

namespace randset {

/// Tolerance for exact algebraic identities.
inline constexpr double identity_tol = 1e-12;
/// Tolerance for comparisons against numerical oracles.
inline constexpr double oracle_tol = 1e-9;

/// Subset of a ground space with `size()` atoms, stored as packed 64-bit words.
class FiniteSet {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    FiniteSet() = default;

    /// Empty set over `size` atoms.
    explicit FiniteSet(std::size_t size)
        : size_(size), words_((size + word_bits - 1) / word_bits, 0) {}

    static FiniteSet full(std::size_t size) {
        FiniteSet s(size);
        std::fill(s.words_.begin(), s.words_.end(), ~word_type{0});
        s.trim();
        return s;
    }

    /// Zero-based atom indices.
    static FiniteSet from_indices(std::size_t size, std::span<const std::size_t> indices) {
        FiniteSet s(size);
        for (auto i : indices) {
            detail::require(i < size, ErrorCode::DimensionMismatch,
                            "atom index " + std::to_string(i) + " outside ground space of size " +
                                std::to_string(size));
            s.insert(i);
        }
        return s;
    }

    static FiniteSet from_indices(std::size_t size, std::initializer_list<std::size_t> indices) {
        return from_indices(size, std::span<const std::size_t>(indices.begin(), indices.size()));
    }

    /// Character i of `bits` is atom i; only '0' and '1' are accepted.
    static FiniteSet from_bits(std::string_view bits) {
        FiniteSet s(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                s.insert(i);
            } else {
                detail::require(bits[i] == '0', ErrorCode::ParseError,
                                "bit string may only contain '0' and '1'");
            }
        }
        return s;
    }

    std::size_t size() const noexcept { return size_; }

    bool contains(std::size_t i) const noexcept {
        return (words_[i / word_bits] >> (i % word_bits)) & 1U;
    }

    void insert(std::size_t i) noexcept { words_[i / word_bits] |= word_type{1} << (i % word_bits); }
    void erase(std::size_t i) noexcept { words_[i / word_bits] &= ~(word_type{1} << (i % word_bits)); }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool is_empty() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](word_type w) { return w == 0; });
    }

    bool is_full() const noexcept { return count() == size_; }

    bool is_subset_of(const FiniteSet& other) const {
        check_conforming(other);
        for (std::size_t k = 0; k < words_.size(); ++k) {
            if ((words_[k] & ~other.words_[k]) != 0) return false;
        }
        return true;
    }

    bool intersects(const FiniteSet& other) const {
        check_conforming(other);
        for (std::size_t k = 0; k < words_.size(); ++k) {
            if ((words_[k] & other.words_[k]) != 0) return true;
        }
        return false;
    }

    /// Calls fn(i) for every member atom in increasing order.
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            word_type w = words_[k];
            while (w != 0) {
                fn(k * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    std::string to_bits() const {
        std::string out(size_, '0');
        for_each([&](std::size_t i) { out[i] = '1'; });
        return out;
    }

    FiniteSet& operator&=(const FiniteSet& rhs) { return combine(rhs, [](word_type a, word_type b) { return a & b; }); }
    FiniteSet& operator|=(const FiniteSet& rhs) { return combine(rhs, [](word_type a, word_type b) { return a | b; }); }
    FiniteSet& operator^=(const FiniteSet& rhs) { return combine(rhs, [](word_type a, word_type b) { return a ^ b; }); }

    friend FiniteSet operator&(FiniteSet lhs, const FiniteSet& rhs) { return lhs &= rhs; }
    friend FiniteSet operator|(FiniteSet lhs, const FiniteSet& rhs) { return lhs |= rhs; }
    friend FiniteSet operator^(FiniteSet lhs, const FiniteSet& rhs) { return lhs ^= rhs; }

    friend FiniteSet operator~(FiniteSet s) {
        for (auto& w : s.words_) w = ~w;
        s.trim();
        return s;
    }

    friend bool operator==(const FiniteSet&, const FiniteSet&) = default;

    /// Lexicographic order of the bit strings (atom 0 leftmost, '0' < '1').
    /// Sets of different sizes order by size first.
    friend std::strong_ordering operator<=>(const FiniteSet& a, const FiniteSet& b) {
        if (auto c = a.size_ <=> b.size_; c != 0) return c;
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            const word_type diff = a.words_[k] ^ b.words_[k];
            if (diff != 0) {
                const auto bit = std::countr_zero(diff);
                return ((a.words_[k] >> bit) & 1U) ? std::strong_ordering::greater
                                                   : std::strong_ordering::less;
            }
        }
        return std::strong_ordering::equal;
    }

    void check_conforming(const FiniteSet& other) const {
        detail::require(size_ == other.size_, ErrorCode::DimensionMismatch,
                        "sets over " + std::to_string(size_) + " and " +
                            std::to_string(other.size_) + " atoms");
    }

private:
    template <class Op>
    FiniteSet& combine(const FiniteSet& rhs, Op op) {
        check_conforming(rhs);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] = op(words_[k], rhs.words_[k]);
        return *this;
    }

    void trim() noexcept {
        const std::size_t tail = size_ % word_bits;
        if (tail != 0 && !words_.empty()) words_.back() &= (word_type{1} << tail) - 1;
    }

    std::size_t size_ = 0;
    std::vector<word_type> words_;
};

/// Finite ground space {1..M} with strictly positive point masses.
class MeasureSpace {
public:
    explicit MeasureSpace(std::vector<double> weights) : weights_(std::move(weights)) {
        detail::require(!weights_.empty(), ErrorCode::EmptySpace, "ground space needs at least one atom");
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            detail::require(std::isfinite(weights_[i]) && weights_[i] > 0.0, ErrorCode::NonPositiveWeight,
                            "weight of atom " + std::to_string(i + 1) + " is not strictly positive");
        }
        total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    /// Space with `size` atoms of mass 1/size each.
    static MeasureSpace uniform(std::size_t size) {
        detail::require(size > 0, ErrorCode::EmptySpace, "ground space needs at least one atom");
        return MeasureSpace(std::vector<double>(size, 1.0 / static_cast<double>(size)));
    }

    std::size_t size() const noexcept { return weights_.size(); }
    double weight(std::size_t i) const noexcept { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    double total_mass() const noexcept { return total_mass_; }

    FiniteSet empty_set() const { return FiniteSet(size()); }
    FiniteSet whole() const { return FiniteSet::full(size()); }

    void check(const FiniteSet& a) const {
        detail::require(a.size() == size(), ErrorCode::DimensionMismatch,
                        "set over " + std::to_string(a.size()) + " atoms used in a space of " +
                            std::to_string(size()) + " atoms");
    }

    template <class Vec>
    void check_vector(const Vec& v) const {
        detail::require(v.size() == size(), ErrorCode::DimensionMismatch,
                        "function of length " + std::to_string(v.size()) + " used in a space of " +
                            std::to_string(size()) + " atoms");
    }

private:
    std::vector<double> weights_;
    double total_mass_ = 0.0;
};

inline MeasureSpace make_space(std::vector<double> weights) { return MeasureSpace(std::move(weights)); }

inline double mu(const MeasureSpace& space, const FiniteSet& a) {
    space.check(a);
    if (a.is_full()) return space.total_mass();
    double sum = 0.0;
    a.for_each([&](std::size_t i) { sum += space.weight(i); });
    return sum;
}

inline FiniteSet intersect(const FiniteSet& a, const FiniteSet& b) { return a & b; }
inline FiniteSet unite(const FiniteSet& a, const FiniteSet& b) { return a | b; }
inline FiniteSet complement(const FiniteSet& a) { return ~a; }
inline FiniteSet sym_diff(const FiniteSet& a, const FiniteSet& b) { return a ^ b; }

/// mu(A Δ B).
inline double kernel_L(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b) {
    return mu(space, sym_diff(a, b));
}

/// ∫|1_A - 1_B|^alpha dm evaluated pointwise; equals kernel_L for every alpha > 0.
inline double indicator_power_integral(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b,
                                       double alpha) {
    space.check(a);
    space.check(b);
    double sum = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double diff = static_cast<double>(a.contains(i)) - static_cast<double>(b.contains(i));
        sum += std::pow(std::abs(diff), alpha) * space.weight(i);
    }
    return sum;
}

/// kernel_L(A,B)^min(1, 1/alpha); alpha = 2 is the L2 distance sqrt(mu(A Δ B)).
inline double dist(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b, double alpha) {
    detail::require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::InvalidAlpha, "alpha must be positive");
    const double l = kernel_L(space, a, b);
    const double exponent = std::min(1.0, 1.0 / alpha);
    return exponent == 1.0 ? l : std::pow(l, exponent);
}

/// mu(A ∩ B), the inner product of indicators.
inline double kernel_K(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b) {
    return mu(space, intersect(a, b));
}

/// The same kernel obtained from kernel_L by polarization at the empty set:
/// ½(L(A,∅) + L(∅,B) − L(A,B)) = ½(μ(A) + μ(B) − μ(AΔB)) = μ(A∩B).
/// Polarizing at Ω instead gives μ(Aᶜ∩Bᶜ), the kernel of the complements.
inline double kernel_K_from_L(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b) {
    const FiniteSet none = space.empty_set();
    return 0.5 * (kernel_L(space, a, none) + kernel_L(space, none, b) - kernel_L(space, a, b));
}

/// K(A,A) = mu(A). This is the squared L2 norm of the indicator, not its root.
inline double set_norm(const MeasureSpace& space, const FiniteSet& a) { return kernel_K(space, a, a); }

inline double cos_angle(const MeasureSpace& space, const FiniteSet& a, const FiniteSet& b) {
    const double ma = mu(space, a);
    const double mb = mu(space, b);
    detail::require(ma > 0.0 && mb > 0.0, ErrorCode::ZeroMeasureSet, "angle needs sets of positive measure");
    if (a == b) return 1.0;
    return std::clamp(kernel_K(space, a, b) / std::sqrt(ma * mb), 0.0, 1.0);
}

struct QuadraticFormWitness {
    std::vector<FiniteSet> sets;
    std::vector<double> coeffs;
    /// Σ_i Σ_j L(A_i, A_j) c_i c_j.
    double value = 0.0;
    /// -2 ∫ (Σ_k c_k 1_{A_k})² dm, which equals `value` for zero-sum coefficients.
    double integral_value = 0.0;
};

inline QuadraticFormWitness quadratic_form_L(const MeasureSpace& space, std::vector<FiniteSet> sets,
                                             std::vector<double> coeffs) {
    detail::require(!sets.empty() && sets.size() == coeffs.size(), ErrorCode::DimensionMismatch,
                    "need equally many sets and coefficients (at least one)");
    for (const auto& s : sets) space.check(s);
    const double total = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    detail::require(std::abs(total) <= identity_tol, ErrorCode::CoefficientsNotZeroSum,
                    "coefficients sum to " + std::to_string(total));

    QuadraticFormWitness w{std::move(sets), std::move(coeffs), 0.0, 0.0};
    const std::size_t n = w.sets.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w.value += kernel_L(space, w.sets[i], w.sets[j]) * w.coeffs[i] * w.coeffs[j];
        }
    }
    double integral = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x) {
        double g = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (w.sets[k].contains(x)) g += w.coeffs[k];
        }
        integral += g * g * space.weight(x);
    }
    w.integral_value = -2.0 * integral;
    return w;
}

struct SystemCheck {
    bool disjoint = false;
    bool covering = false;

    bool complete() const noexcept { return disjoint && covering; }
    /// Indicators are orthogonal but the events do not exhaust Ω.
    bool orthogonal_incomplete() const noexcept { return disjoint && !covering; }
};

inline SystemCheck classify_system(const MeasureSpace& space, std::span<const FiniteSet> sets) {
    detail::require(!sets.empty(), ErrorCode::InvalidParameter, "event system is empty");
    SystemCheck result{true, false};
    FiniteSet cover = space.empty_set();
    for (const auto& s : sets) {
        space.check(s);
        if (cover.intersects(s)) result.disjoint = false;
        cover |= s;
    }
    result.covering = cover.is_full();
    return result;
}

inline bool is_complete_system(const MeasureSpace& space, std::span<const FiniteSet> sets) {
    return classify_system(space, sets).complete();
}

inline bool is_orthogonal_system(const MeasureSpace& space, std::span<const FiniteSet> sets) {
    return classify_system(space, sets).disjoint;
}

struct Projection {
    /// a_j = mu(A ∩ A_j) / mu(A_j).
    std::vector<double> coefficients;
    /// ∫ (1_A - Σ a_j 1_{A_j})² dm.
    double residual = 0.0;
    double coefficient_sum = 0.0;
    /// Weight a_{n+1} = 1 - Σ a_j placed on an appended empty event.
    double completion_coefficient = 0.0;
    bool complete_system = false;
};

/// Best L2 approximation of 1_A by the span of a disjoint event system.
inline Projection project(const MeasureSpace& space, const FiniteSet& a, std::span<const FiniteSet> system) {
    space.check(a);
    FiniteSet cover = space.empty_set();
    for (std::size_t j = 0; j < system.size(); ++j) {
        space.check(system[j]);
        detail::require(!cover.intersects(system[j]), ErrorCode::NotDisjointSystem,
                        "event " + std::to_string(j + 1) + " overlaps an earlier event");
        cover |= system[j];
    }

    Projection p;
    p.coefficients.reserve(system.size());
    std::vector<double> approx(space.size(), 0.0);
    for (std::size_t j = 0; j < system.size(); ++j) {
        const double mj = mu(space, system[j]);
        detail::require(mj > 0.0, ErrorCode::ZeroMeasureSet,
                        "event " + std::to_string(j + 1) + " has measure zero");
        const double coeff = kernel_K(space, a, system[j]) / mj;
        p.coefficients.push_back(coeff);
        p.coefficient_sum += coeff;
        system[j].for_each([&](std::size_t x) { approx[x] = coeff; });
    }
    for (std::size_t x = 0; x < space.size(); ++x) {
        const double r = static_cast<double>(a.contains(x)) - approx[x];
        p.residual += r * r * space.weight(x);
    }
    p.completion_coefficient = 1.0 - p.coefficient_sum;
    p.complete_system = cover.is_full();
    return p;
}

}  // namespace randset
