#pragma once

// Finitely supported random sets, their mean indicator functions, and the
// distances and semigroup operations defined on those functions.
//
// The map D -> mean_function(D) is not injective, so the N-distances below
// are metrics on mean functions and only pseudometrics on distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "randset/error.hpp"
#include "randset/measure_space.hpp"
#include "randset/rng.hpp"

namespace randset {

/// f(x) = Σ_j p_j 1_{A_j}(x): a point of the convex hull of indicators.
class MeanFunction {
public:
    MeanFunction() = default;

    /// Entries must lie in [0, 1] up to identity_tol; they are clamped onto it.
    explicit MeanFunction(std::vector<double> values) : values_(std::move(values)) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const double v = values_[i];
            detail::require(std::isfinite(v) && v >= -identity_tol && v <= 1.0 + identity_tol,
                            ErrorCode::InvalidMeanFunction,
                            "value at atom " + std::to_string(i + 1) + " outside [0, 1]");
            values_[i] = std::clamp(v, 0.0, 1.0);
        }
    }

    static MeanFunction indicator(const FiniteSet& a) {
        std::vector<double> v(a.size(), 0.0);
        a.for_each([&](std::size_t i) { v[i] = 1.0; });
        return MeanFunction(std::move(v));
    }

    static MeanFunction constant(std::size_t size, double value) {
        return MeanFunction(std::vector<double>(size, value));
    }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// 1 - f, the mean function of the complementary random set.
    MeanFunction complement() const {
        std::vector<double> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), [](double x) { return 1.0 - x; });
        return MeanFunction(std::move(v));
    }

    friend bool operator==(const MeanFunction&, const MeanFunction&) = default;

private:
    std::vector<double> values_;
};

/// Canonical finitely supported distribution over sets: distinct support in
/// increasing bit-string order, strictly positive probabilities summing to 1.
class DiscreteRandomSet {
public:
    /// Merges duplicate sets, drops zero atoms, sorts, and renormalizes.
    /// Probabilities must sum to 1 within 1e-9.
    static DiscreteRandomSet make(std::vector<FiniteSet> support, std::vector<double> probs) {
        detail::require(support.size() == probs.size(), ErrorCode::DimensionMismatch,
                        "support and probability lists differ in length");
        detail::require(!support.empty(), ErrorCode::ProbabilitySumMismatch, "empty support");
        const std::size_t dim = support.front().size();
        double total = 0.0;
        for (std::size_t j = 0; j < support.size(); ++j) {
            detail::require(support[j].size() == dim, ErrorCode::DimensionMismatch,
                            "support sets over different ground spaces");
            detail::require(std::isfinite(probs[j]) && probs[j] >= 0.0, ErrorCode::NegativeProbability,
                            "probability " + std::to_string(j + 1) + " is negative");
            total += probs[j];
        }
        detail::require(std::abs(total - 1.0) <= 1e-9, ErrorCode::ProbabilitySumMismatch,
                        "probabilities sum to " + std::to_string(total));

        std::vector<std::size_t> order(support.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

        DiscreteRandomSet d;
        d.dimension_ = dim;
        for (auto j : order) {
            if (probs[j] == 0.0) continue;
            if (!d.support_.empty() && d.support_.back() == support[j]) {
                d.probs_.back() += probs[j];
            } else {
                d.support_.push_back(support[j]);
                d.probs_.push_back(probs[j]);
            }
        }
        for (auto& p : d.probs_) p /= total;
        return d;
    }

    static DiscreteRandomSet degenerate(const FiniteSet& a) { return make({a}, {1.0}); }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t support_size() const noexcept { return support_.size(); }
    std::span<const FiniteSet> support() const noexcept { return support_; }
    std::span<const double> probs() const noexcept { return probs_; }

    /// Probability of `a`; 0 off the support.
    double probability(const FiniteSet& a) const {
        auto it = std::lower_bound(support_.begin(), support_.end(), a);
        if (it == support_.end() || *it != a) return 0.0;
        return probs_[static_cast<std::size_t>(it - support_.begin())];
    }

    friend bool operator==(const DiscreteRandomSet&, const DiscreteRandomSet&) = default;

private:
    DiscreteRandomSet() = default;

    std::size_t dimension_ = 0;
    std::vector<FiniteSet> support_;
    std::vector<double> probs_;
};

inline DiscreteRandomSet make_random_set(std::vector<FiniteSet> support, std::vector<double> probs) {
    return DiscreteRandomSet::make(std::move(support), std::move(probs));
}

inline MeanFunction mean_function(const DiscreteRandomSet& d) {
    std::vector<double> f(d.dimension(), 0.0);
    for (std::size_t j = 0; j < d.support_size(); ++j) {
        const double p = d.probs()[j];
        d.support()[j].for_each([&](std::size_t i) { f[i] += p; });
    }
    return MeanFunction(std::move(f));
}

inline MeanFunction mean_function(const MeasureSpace& space, const DiscreteRandomSet& d) {
    detail::require(d.dimension() == space.size(), ErrorCode::DimensionMismatch,
                    "distribution does not conform to the space");
    return mean_function(d);
}

namespace detail {

inline double expected_kernel_L(const MeasureSpace& space, const DiscreteRandomSet& a,
                                const DiscreteRandomSet& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.support_size(); ++i) {
        for (std::size_t j = 0; j < b.support_size(); ++j) {
            sum += kernel_L(space, a.support()[i], b.support()[j]) * a.probs()[i] * b.probs()[j];
        }
    }
    return sum;
}

inline void check_pair(const MeanFunction& f, const MeanFunction& g) {
    require(f.size() == g.size(), ErrorCode::DimensionMismatch, "mean functions of different length");
}

}  // namespace detail

/// 2E L(A,B) - E L(A,A') - E L(B,B') over independent copies. Since
/// E L(A,B) = ∫ f + g - 2fg, this is 2∫(f - g)², twice the squared N-distance.
inline double n_distance_sq_double(const MeasureSpace& space, const DiscreteRandomSet& dm,
                                   const DiscreteRandomSet& dn) {
    detail::require(dm.dimension() == space.size() && dn.dimension() == space.size(),
                    ErrorCode::DimensionMismatch, "distributions do not conform to the space");
    return 2.0 * detail::expected_kernel_L(space, dm, dn) - detail::expected_kernel_L(space, dm, dm) -
           detail::expected_kernel_L(space, dn, dn);
}

inline constexpr double infinite_order = std::numeric_limits<double>::infinity();

/// (Σ_i |f_i - g_i|^p w_i)^{1/p} for p >= 1; max_i |f_i - g_i| for p = ∞.
inline double n_distance_p(const MeasureSpace& space, const MeanFunction& f, const MeanFunction& g, double p) {
    detail::require(p >= 1.0, ErrorCode::InvalidOrder, "order p must be at least 1");
    space.check_vector(f);
    space.check_vector(g);
    double peak = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) peak = std::max(peak, std::abs(f[i] - g[i]));
    if (std::isinf(p) || peak == 0.0) return peak;
    if (p == 2.0) {
        double sum = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = f[i] - g[i];
            sum += d * d * space.weight(i);
        }
        return std::sqrt(sum);
    }
    // Scale by the peak so large p does not underflow.
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sum += std::pow(std::abs(f[i] - g[i]) / peak, p) * space.weight(i);
    }
    return peak * std::pow(sum, 1.0 / p);
}

inline double n_distance(const MeasureSpace& space, const MeanFunction& f, const MeanFunction& g) {
    return n_distance_p(space, f, g, 2.0);
}

/// ∫ f g dm, positive definite on mean functions.
inline double mean_kernel(const MeasureSpace& space, const MeanFunction& f, const MeanFunction& g) {
    space.check_vector(f);
    space.check_vector(g);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i] * space.weight(i);
    return sum;
}

/// ∫ (1 - f)(1 - g) dm, the kernel paired with op_star.
inline double complement_kernel(const MeasureSpace& space, const MeanFunction& f, const MeanFunction& g) {
    space.check_vector(f);
    space.check_vector(g);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += (1.0 - f[i]) * (1.0 - g[i]) * space.weight(i);
    return sum;
}

/// Pointwise product; on indicators this is intersection.
inline MeanFunction op_circ(const MeanFunction& f, const MeanFunction& g) {
    detail::check_pair(f, g);
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i] * g[i];
    return MeanFunction(std::move(v));
}

/// Pointwise (1 - f)(1 - g); on indicators this is the complement of the union.
inline MeanFunction op_star(const MeanFunction& f, const MeanFunction& g) {
    detail::check_pair(f, g);
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = (1.0 - f[i]) * (1.0 - g[i]);
    return MeanFunction(std::move(v));
}

/// Law of A ∩ B for independent A ~ dm, B ~ dn.
inline DiscreteRandomSet intersect_independent(const DiscreteRandomSet& dm, const DiscreteRandomSet& dn) {
    detail::require(dm.dimension() == dn.dimension(), ErrorCode::DimensionMismatch,
                    "distributions over different ground spaces");
    std::vector<FiniteSet> sets;
    std::vector<double> probs;
    sets.reserve(dm.support_size() * dn.support_size());
    probs.reserve(sets.capacity());
    for (std::size_t i = 0; i < dm.support_size(); ++i) {
        for (std::size_t j = 0; j < dn.support_size(); ++j) {
            sets.push_back(intersect(dm.support()[i], dn.support()[j]));
            probs.push_back(dm.probs()[i] * dn.probs()[j]);
        }
    }
    return make_random_set(std::move(sets), std::move(probs));
}

inline DiscreteRandomSet intersect_independent(const MeasureSpace& space, const DiscreteRandomSet& dm,
                                               const DiscreteRandomSet& dn) {
    detail::require(dm.dimension() == space.size(), ErrorCode::DimensionMismatch,
                    "distribution does not conform to the space");
    return intersect_independent(dm, dn);
}

/// Conditions on the event {A != drop}: removes `drop` and rescales the rest
/// by 1/(1 - p_drop). For drop = ∅ the mean function scales by the same factor.
inline DiscreteRandomSet condition_nonvalue(const DiscreteRandomSet& d, const FiniteSet& drop) {
    const double p_drop = d.probability(drop);
    detail::require(p_drop > 0.0, ErrorCode::NotInSupport, "set " + drop.to_bits() + " is not in the support");
    const double keep = 1.0 - p_drop;
    detail::require(keep > 0.0 && d.support_size() > 1, ErrorCode::TotalMassRemoved,
                    "conditioning removes all probability mass");
    std::vector<FiniteSet> sets;
    std::vector<double> probs;
    for (std::size_t j = 0; j < d.support_size(); ++j) {
        if (d.support()[j] == drop) continue;
        sets.push_back(d.support()[j]);
        probs.push_back(d.probs()[j] / keep);
    }
    return make_random_set(std::move(sets), std::move(probs));
}

/// One inverse-CDF draw: the first support index whose cumulative
/// probability exceeds u = rng.uniform01().
inline std::size_t sample_index(const DiscreteRandomSet& d, CounterRng& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::size_t j = 0; j + 1 < d.support_size(); ++j) {
        cumulative += d.probs()[j];
        if (u < cumulative) return j;
    }
    return d.support_size() - 1;
}

inline std::vector<FiniteSet> sample(const DiscreteRandomSet& d, CounterRng& rng, std::size_t n) {
    std::vector<FiniteSet> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(d.support()[sample_index(d, rng)]);
    return out;
}

/// n i.i.d. draws from the stream keyed by `seed`.
inline std::vector<FiniteSet> sample(const DiscreteRandomSet& d, std::uint64_t seed, std::size_t n) {
    detail::require(n >= 1, ErrorCode::InvalidParameter, "sample size must be at least 1");
    CounterRng rng(seed);
    return sample(d, rng, n);
}

}  // namespace randset
