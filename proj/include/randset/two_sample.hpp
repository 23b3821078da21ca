#pragma once

// Two-sample inference for random sets: the empirical N statistic, its
// permutation test, and the reduction of partially observed sets to binary
// cell vectors tested with the Euclidean energy statistic.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randset/error.hpp"
#include "randset/measure_space.hpp"
#include "randset/random_set.hpp"
#include "randset/rng.hpp"

namespace randset {

struct SetSample {
    std::vector<FiniteSet> observations;
    std::string label;
};

inline void validate_sample(const MeasureSpace& space, const SetSample& s) {
    detail::require(!s.observations.empty(), ErrorCode::EmptySample, "sample '" + s.label + "' is empty");
    for (const auto& a : s.observations) space.check(a);
}

/// Disjoint cells covering Ω.
class CellPartition {
public:
    CellPartition(const MeasureSpace& space, std::vector<FiniteSet> cells) : cells_(std::move(cells)) {
        detail::require(!cells_.empty(), ErrorCode::InvalidPartition, "partition has no cells");
        FiniteSet cover = space.empty_set();
        for (std::size_t l = 0; l < cells_.size(); ++l) {
            detail::require(cells_[l].size() == space.size(), ErrorCode::InvalidPartition,
                            "cell " + std::to_string(l + 1) + " does not conform to the space");
            detail::require(!cover.intersects(cells_[l]), ErrorCode::InvalidPartition,
                            "cell " + std::to_string(l + 1) + " overlaps an earlier cell");
            cover |= cells_[l];
        }
        detail::require(cover.is_full(), ErrorCode::InvalidPartition, "cells do not cover the space");
    }

    std::size_t size() const noexcept { return cells_.size(); }
    std::span<const FiniteSet> cells() const noexcept { return cells_; }

private:
    std::vector<FiniteSet> cells_;
};

/// a_l = 1 iff the observed set meets cell l.
struct BinaryObservationVector {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    double operator[](std::size_t l) const noexcept { return bits[l]; }
    friend bool operator==(const BinaryObservationVector&, const BinaryObservationVector&) = default;
};

template <class V>
concept CoordinateVector = requires(const V& v, std::size_t i) {
    { v.size() } -> std::convertible_to<std::size_t>;
    { v[i] } -> std::convertible_to<double>;
};

struct TestResult {
    double statistic = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
    std::uint64_t seed = 0;
    std::size_t n_permutations = 0;
    bool exhaustive = false;
};

struct PermutationOptions {
    std::size_t n_permutations = 999;
    std::uint64_t seed = 0;
    /// Enumerate every split instead of sampling; needs C(2n, n) <= max_exhaustive_splits.
    bool exhaustive = false;
};

inline constexpr std::size_t max_exhaustive_splits = 100000;

/// A replicate counts as at least as extreme when it is within this relative
/// amount of the observed statistic.
inline constexpr double tie_tolerance = 1e-12;

inline bool at_least_as_extreme(double replicate, double statistic) noexcept {
    return replicate >= statistic - tie_tolerance * std::max(1.0, std::abs(statistic));
}

/// (1 + #{replicates >= statistic}) / (B + 1).
inline double permutation_p_value(double statistic, std::span<const double> replicates) {
    const auto hits = std::count_if(replicates.begin(), replicates.end(),
                                    [&](double r) { return at_least_as_extreme(r, statistic); });
    return (1.0 + static_cast<double>(hits)) / (static_cast<double>(replicates.size()) + 1.0);
}

/// (2/n²) Σ L(A_i,B_j) - (1/n²) Σ L(A_i,A_j) - (1/n²) Σ L(B_i,B_j).
inline double empirical_n_statistic(const MeasureSpace& space, const SetSample& a, const SetSample& b) {
    validate_sample(space, a);
    validate_sample(space, b);
    const std::size_t n = a.observations.size();
    detail::require(b.observations.size() == n, ErrorCode::UnequalSampleSizes,
                    "samples have sizes " + std::to_string(n) + " and " +
                        std::to_string(b.observations.size()));
    auto double_sum = [&](const std::vector<FiniteSet>& x, const std::vector<FiniteSet>& y) {
        double s = 0.0;
        for (const auto& u : x) {
            for (const auto& v : y) s += kernel_L(space, u, v);
        }
        return s;
    };
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return (2.0 * double_sum(a.observations, b.observations) - double_sum(a.observations, a.observations) -
            double_sum(b.observations, b.observations)) /
           nn;
}

/// Uniform-weight distribution over the observations of a sample.
inline DiscreteRandomSet empirical_distribution(const SetSample& s) {
    detail::require(!s.observations.empty(), ErrorCode::EmptySample, "sample '" + s.label + "' is empty");
    const double w = 1.0 / static_cast<double>(s.observations.size());
    return make_random_set(s.observations, std::vector<double>(s.observations.size(), w));
}

namespace detail {

/// Energy statistic of the split `in_first` over a pooled dissimilarity
/// matrix (row-major, size 2n x 2n).
inline double split_statistic(std::span<const double> dissim, std::size_t pooled, std::span<const std::uint8_t> in_first,
                              std::size_t n) {
    double cross = 0.0, within_a = 0.0, within_b = 0.0;
    for (std::size_t i = 0; i < pooled; ++i) {
        const double* row = dissim.data() + i * pooled;
        for (std::size_t j = 0; j < pooled; ++j) {
            if (in_first[i] != in_first[j]) {
                cross += row[j];
            } else if (in_first[i]) {
                within_a += row[j];
            } else {
                within_b += row[j];
            }
        }
    }
    // `cross` visits every mixed pair twice, matching the factor 2.
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return (cross - within_a - within_b) / nn;
}

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > cap) return cap + 1;
    }
    return r;
}

/// Permutation test over a pooled dissimilarity matrix whose first n rows
/// are the first sample.
inline TestResult permutation_test_pooled(std::span<const double> dissim, std::size_t n,
                                          const PermutationOptions& options) {
    const std::size_t pooled = 2 * n;
    std::vector<std::uint8_t> split(pooled, 0);
    std::fill(split.begin(), split.begin() + static_cast<std::ptrdiff_t>(n), std::uint8_t{1});

    TestResult result;
    result.seed = options.seed;
    result.statistic = split_statistic(dissim, pooled, split, n);

    if (options.exhaustive) {
        const auto splits = binomial_capped(pooled, n, max_exhaustive_splits);
        require(splits <= max_exhaustive_splits, ErrorCode::InvalidParameter,
                "exhaustive enumeration needs C(2n, n) <= " + std::to_string(max_exhaustive_splits));
        // Visit every n-subset as the first group; skip the observed split.
        std::vector<std::uint8_t> mask(pooled, 0);
        std::fill(mask.end() - static_cast<std::ptrdiff_t>(n), mask.end(), std::uint8_t{1});
        do {
            if (mask == split) continue;
            result.replicates.push_back(split_statistic(dissim, pooled, mask, n));
        } while (std::next_permutation(mask.begin(), mask.end()));
        result.exhaustive = true;
    } else {
        require(options.n_permutations >= 1, ErrorCode::InvalidParameter, "need at least one permutation");
        std::vector<std::size_t> order(pooled);
        std::vector<std::uint8_t> mask(pooled);
        result.replicates.reserve(options.n_permutations);
        for (std::size_t r = 0; r < options.n_permutations; ++r) {
            CounterRng rng(derive_seed(options.seed, r));
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = pooled - 1; i > 0; --i) {
                std::swap(order[i], order[static_cast<std::size_t>(rng.bounded(i + 1))]);
            }
            std::fill(mask.begin(), mask.end(), std::uint8_t{0});
            for (std::size_t k = 0; k < n; ++k) mask[order[k]] = 1;
            result.replicates.push_back(split_statistic(dissim, pooled, mask, n));
        }
    }
    result.n_permutations = result.replicates.size();
    result.p_value = permutation_p_value(result.statistic, result.replicates);
    return result;
}

}  // namespace detail

/// Monte-Carlo (or exhaustive) permutation test of equal mean functions.
///
/// Replicate r re-splits the pooled sample with a Fisher-Yates shuffle
/// driven by CounterRng(derive_seed(seed, r)); the first n shuffled
/// positions form the first group. Results do not depend on evaluation
/// order.
inline TestResult permutation_test(const MeasureSpace& space, const SetSample& a, const SetSample& b,
                                   const PermutationOptions& options) {
    validate_sample(space, a);
    validate_sample(space, b);
    const std::size_t n = a.observations.size();
    detail::require(b.observations.size() == n, ErrorCode::UnequalSampleSizes,
                    "samples have sizes " + std::to_string(n) + " and " +
                        std::to_string(b.observations.size()));
    std::vector<const FiniteSet*> pool;
    for (const auto& s : a.observations) pool.push_back(&s);
    for (const auto& s : b.observations) pool.push_back(&s);
    std::vector<double> dissim(pool.size() * pool.size(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            const double l = kernel_L(space, *pool[i], *pool[j]);
            dissim[i * pool.size() + j] = l;
            dissim[j * pool.size() + i] = l;
        }
    }
    return detail::permutation_test_pooled(dissim, n, options);
}

inline TestResult permutation_test(const MeasureSpace& space, const SetSample& a, const SetSample& b,
                                   std::size_t n_permutations, std::uint64_t seed) {
    return permutation_test(space, a, b, PermutationOptions{n_permutations, seed, false});
}

inline std::vector<BinaryObservationVector> discretize(const CellPartition& partition, const SetSample& sample) {
    std::vector<BinaryObservationVector> out;
    out.reserve(sample.observations.size());
    for (const auto& a : sample.observations) {
        BinaryObservationVector v;
        v.bits.reserve(partition.size());
        for (const auto& cell : partition.cells()) {
            detail::require(cell.size() == a.size(), ErrorCode::DimensionMismatch,
                            "observation does not conform to the partition");
            v.bits.push_back(a.intersects(cell) ? 1 : 0);
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Measure variant of the cell vectors: mu(A ∩ C_l) / mu(C_l).
inline std::vector<std::vector<double>> discretize_measure(const MeasureSpace& space, const CellPartition& partition,
                                                           const SetSample& sample) {
    std::vector<std::vector<double>> out;
    out.reserve(sample.observations.size());
    for (const auto& a : sample.observations) {
        std::vector<double> v;
        v.reserve(partition.size());
        for (const auto& cell : partition.cells()) v.push_back(kernel_K(space, a, cell) / mu(space, cell));
        out.push_back(std::move(v));
    }
    return out;
}

template <CoordinateVector V>
std::vector<double> cell_means(std::span<const V> vectors) {
    detail::require(!vectors.empty(), ErrorCode::EmptySample, "no observation vectors");
    const std::size_t s = vectors.front().size();
    std::vector<double> mean(s, 0.0);
    for (const auto& v : vectors) {
        detail::require(v.size() == s, ErrorCode::DimensionMismatch, "observation vectors differ in length");
        for (std::size_t l = 0; l < s; ++l) mean[l] += static_cast<double>(v[l]);
    }
    for (auto& m : mean) m /= static_cast<double>(vectors.size());
    return mean;
}

template <CoordinateVector V>
std::vector<double> cell_means(const std::vector<V>& vectors) {
    return cell_means(std::span<const V>(vectors));
}

namespace detail {

inline void check_exponent(double exponent) {
    require(exponent > 0.0 && exponent < 2.0, ErrorCode::InvalidParameter, "distance exponent must lie in (0, 2)");
}

template <CoordinateVector V>
double euclidean_power(const V& x, const V& y, double exponent) {
    double sq = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) {
        const double d = static_cast<double>(x[l]) - static_cast<double>(y[l]);
        sq += d * d;
    }
    return exponent == 1.0 ? std::sqrt(sq) : std::pow(sq, 0.5 * exponent);
}

template <CoordinateVector V>
std::size_t check_vector_samples(std::span<const V> a, std::span<const V> b) {
    require(!a.empty() && !b.empty(), ErrorCode::EmptySample, "vector samples must be nonempty");
    require(a.size() == b.size(), ErrorCode::UnequalSampleSizes,
            "samples have sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    const std::size_t s = a.front().size();
    for (const auto& v : a) require(v.size() == s, ErrorCode::DimensionMismatch, "vectors differ in dimension");
    for (const auto& v : b) require(v.size() == s, ErrorCode::DimensionMismatch, "vectors differ in dimension");
    return a.size();
}

}  // namespace detail

/// Energy statistic with the kernel ‖x - y‖^exponent (default Euclidean distance).
template <CoordinateVector V>
double vector_n_statistic(std::span<const V> a, std::span<const V> b, double exponent = 1.0) {
    detail::check_exponent(exponent);
    const std::size_t n = detail::check_vector_samples(a, b);
    auto double_sum = [&](std::span<const V> x, std::span<const V> y) {
        double s = 0.0;
        for (const auto& u : x) {
            for (const auto& v : y) s += detail::euclidean_power(u, v, exponent);
        }
        return s;
    };
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return (2.0 * double_sum(a, b) - double_sum(a, a) - double_sum(b, b)) / nn;
}

template <CoordinateVector V>
double vector_n_statistic(const std::vector<V>& a, const std::vector<V>& b, double exponent = 1.0) {
    return vector_n_statistic(std::span<const V>(a), std::span<const V>(b), exponent);
}

template <CoordinateVector V>
TestResult vector_permutation_test(std::span<const V> a, std::span<const V> b, const PermutationOptions& options,
                                   double exponent = 1.0) {
    detail::check_exponent(exponent);
    const std::size_t n = detail::check_vector_samples(a, b);
    std::vector<const V*> pool;
    for (const auto& v : a) pool.push_back(&v);
    for (const auto& v : b) pool.push_back(&v);
    std::vector<double> dissim(pool.size() * pool.size(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            const double d = detail::euclidean_power(*pool[i], *pool[j], exponent);
            dissim[i * pool.size() + j] = d;
            dissim[j * pool.size() + i] = d;
        }
    }
    return detail::permutation_test_pooled(dissim, n, options);
}

template <CoordinateVector V>
TestResult vector_permutation_test(const std::vector<V>& a, const std::vector<V>& b, std::size_t n_permutations,
                                   std::uint64_t seed, double exponent = 1.0) {
    return vector_permutation_test(std::span<const V>(a), std::span<const V>(b),
                                   PermutationOptions{n_permutations, seed, false}, exponent);
}

struct SimulationConfig {
    std::size_t sample_size = 20;
    std::size_t n_permutations = 999;
    std::size_t trials = 500;
    double significance = 0.05;
    std::uint64_t seed = 0;
    /// When set, observations are reduced to cell vectors and tested with
    /// the vector statistic.
    std::optional<CellPartition> partition;
};

struct SimulationSummary {
    std::size_t trials = 0;
    std::size_t rejections = 0;
    std::vector<double> p_values;

    double rejection_rate() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(trials);
    }
};

/// Repeats the two-sample test on fresh samples from (d_a, d_b). Trial t
/// draws the first sample from derive_seed(seed, 3t), the second from
/// derive_seed(seed, 3t + 1), and permutes with derive_seed(seed, 3t + 2).
/// A trial rejects when p <= significance.
inline SimulationSummary simulate_rejection_rate(const MeasureSpace& space, const DiscreteRandomSet& d_a,
                                                 const DiscreteRandomSet& d_b, const SimulationConfig& config) {
    detail::require(config.sample_size >= 1 && config.trials >= 1, ErrorCode::InvalidParameter,
                    "sample size and trial count must be positive");
    detail::require(config.significance > 0.0 && config.significance < 1.0, ErrorCode::InvalidParameter,
                    "significance must lie in (0, 1)");
    SimulationSummary summary;
    summary.trials = config.trials;
    summary.p_values.reserve(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
        const SetSample a{sample(d_a, derive_seed(config.seed, 3 * t), config.sample_size), "A"};
        const SetSample b{sample(d_b, derive_seed(config.seed, 3 * t + 1), config.sample_size), "B"};
        const PermutationOptions options{config.n_permutations, derive_seed(config.seed, 3 * t + 2), false};
        double p = 1.0;
        if (config.partition) {
            const auto va = discretize(*config.partition, a);
            const auto vb = discretize(*config.partition, b);
            p = vector_permutation_test(std::span<const BinaryObservationVector>(va),
                                        std::span<const BinaryObservationVector>(vb), options)
                    .p_value;
        } else {
            p = permutation_test(space, a, b, options).p_value;
        }
        summary.p_values.push_back(p);
        if (p <= config.significance) ++summary.rejections;
    }
    return summary;
}

}  // namespace randset
