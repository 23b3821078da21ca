#pragma once

// Behaviour of mean functions under repeated ∘-multiplication: stability
// (f^n = kappa_n f), convergence to the common core of a nested support,
// normalized convergence to a stable component, and ξ-stability of
// geometric chains.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randset/error.hpp"
#include "randset/measure_space.hpp"
#include "randset/random_set.hpp"

namespace randset {

/// Pointwise n-th power, computed as n - 1 successive op_circ products.
inline MeanFunction power_mean(const MeanFunction& f, unsigned n) {
    detail::require(n >= 1, ErrorCode::InvalidParameter, "power must be at least 1");
    MeanFunction result = f;
    for (unsigned k = 1; k < n; ++k) result = op_circ(f, result);
    return result;
}

namespace detail {

inline double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double peak = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) peak = std::max(peak, std::abs(a[i] - b[i]));
    return peak;
}

inline double ipow(double x, unsigned n) {
    double r = 1.0;
    for (unsigned k = 0; k < n; ++k) r *= x;
    return r;
}

}  // namespace detail

struct StabilityReport {
    bool is_stable = false;
    /// The single nonzero level c of f, if f has one.
    std::optional<double> nonzero_value;
    /// Distinct nonzero levels of f (clustered within the tolerance).
    std::vector<double> levels;
    /// kappa_n for n = 2..n_max, with f^n = kappa_n f; equals c^{n-1}.
    std::vector<double> kappa;
    /// 1 / kappa_n, the factor that restores the original probabilities.
    std::vector<double> normalizer;
    /// max_x |f^n - kappa_n f| for n = 2..n_max.
    std::vector<double> residual;
    double max_residual = 0.0;
    /// Whether the level-count characterization and the direct pointwise
    /// comparison agree.
    bool cross_check_agrees = true;

    unsigned n_max() const noexcept { return static_cast<unsigned>(kappa.size() + 1); }
};

/// D is stable iff its mean function has at most one nonzero level c; then
/// kappa_n = c^{n-1}. A mean function that is identically zero is stable with
/// kappa_n = 1.
inline StabilityReport check_stable(const MeasureSpace& space, const DiscreteRandomSet& d, unsigned n_max,
                                    double tol = oracle_tol) {
    detail::require(n_max >= 2, ErrorCode::InvalidParameter, "n_max must be at least 2");
    const MeanFunction f = mean_function(space, d);

    StabilityReport report;
    std::vector<double> positive;
    for (double v : f.values()) {
        if (v > 0.0) positive.push_back(v);
    }
    std::sort(positive.begin(), positive.end());
    for (double v : positive) {
        if (report.levels.empty() || v - report.levels.back() > tol) report.levels.push_back(v);
    }
    report.is_stable = report.levels.size() <= 1;
    if (!report.is_stable) return report;

    const double c = report.levels.empty() ? 1.0 : positive.back();
    if (!report.levels.empty()) report.nonzero_value = c;

    MeanFunction fn = f;
    for (unsigned n = 2; n <= n_max; ++n) {
        fn = op_circ(f, fn);
        const double kappa = detail::ipow(c, n - 1);
        report.kappa.push_back(kappa);
        report.normalizer.push_back(1.0 / kappa);
        double residual = 0.0;
        for (std::size_t x = 0; x < f.size(); ++x) residual = std::max(residual, std::abs(fn[x] - kappa * f[x]));
        report.residual.push_back(residual);
        report.max_residual = std::max(report.max_residual, residual);
    }
    report.cross_check_agrees = report.max_residual <= tol;
    return report;
}

struct Theorem1Row {
    unsigned n = 0;
    /// sup_x |f^n(x) - 1_{A1}(x)|.
    double sup_error = 0.0;
    /// (1 - p1)^n.
    double bound = 0.0;
};

struct Theorem1Table {
    FiniteSet core;
    double core_probability = 0.0;
    /// An atom outside the core lying in every other support set, where the
    /// bound is attained.
    std::optional<std::size_t> witness;
    std::vector<Theorem1Row> rows;
};

/// Distance of f^n from the indicator of the common core A1 = ∩ support,
/// which must itself be a support atom with positive probability.
inline Theorem1Table theorem1_convergence(const MeasureSpace& space, const DiscreteRandomSet& d,
                                          unsigned n_max) {
    detail::require(n_max >= 1, ErrorCode::InvalidParameter, "n_max must be at least 1");
    detail::require(d.dimension() == space.size(), ErrorCode::DimensionMismatch,
                    "distribution does not conform to the space");
    FiniteSet core = space.whole();
    for (const auto& s : d.support()) core &= s;
    const double p1 = d.probability(core);
    detail::require(p1 > 0.0, ErrorCode::PreconditionFailed,
                    "core_in_support: the intersection of the support (" + core.to_bits() +
                        ") is not a support atom with positive probability");

    Theorem1Table table{core, p1, std::nullopt, {}};
    FiniteSet others = space.whole();
    for (const auto& s : d.support()) {
        if (s != core) others &= s;
    }
    for (std::size_t x = 0; x < space.size(); ++x) {
        if (others.contains(x) && !core.contains(x)) {
            table.witness = x;
            break;
        }
    }

    const MeanFunction f = mean_function(d);
    const MeanFunction target = MeanFunction::indicator(core);
    MeanFunction fn = f;
    for (unsigned n = 1; n <= n_max; ++n) {
        if (n > 1) fn = op_circ(f, fn);
        table.rows.push_back({n, detail::sup_abs_diff(fn.values(), target.values()),
                              detail::ipow(1.0 - p1, n)});
    }
    return table;
}

struct Decomposition {
    double p1 = 0.0;
    double p2 = 0.0;
    std::vector<double> h;
};

struct Theorem2Row {
    unsigned n = 0;
    double kappa = 0.0;
    /// 1 / (kappa_n p1^n): makes the coefficient of f_B in lambda_n f_A^n exactly one.
    double lambda = 0.0;
    /// p2^n / (kappa_n p1^n), which must vanish.
    double premise_ratio = 0.0;
    /// (lambda_n p1^n kappa_n - 1), the f_B coefficient of the error.
    double bias_term = 0.0;
    /// lambda_n p2^n max(h^n).
    double decay_term = 0.0;
    /// sup_x |lambda_n f_A^n(x) - f_B(x)|, computed directly.
    double sup_error = 0.0;
};

struct Theorem2Table {
    double stable_level = 1.0;
    std::vector<Theorem2Row> rows;
};

inline Theorem2Table theorem2_convergence(const MeasureSpace& space, const DiscreteRandomSet& d_a,
                                          const DiscreteRandomSet& d_b, const Decomposition& dec,
                                          unsigned n_max) {
    detail::require(n_max >= 2, ErrorCode::InvalidParameter, "n_max must be at least 2");
    const MeanFunction fa = mean_function(space, d_a);
    const MeanFunction fb = mean_function(space, d_b);
    space.check_vector(dec.h);
    detail::require(std::isfinite(dec.p1) && dec.p1 > 0.0 && std::isfinite(dec.p2) && dec.p2 >= 0.0,
                    ErrorCode::DecompositionInvalid, "need p1 > 0 and p2 >= 0");
    for (std::size_t x = 0; x < space.size(); ++x) {
        detail::require(std::abs(fa[x] - (dec.p1 * fb[x] + dec.p2 * dec.h[x])) <= identity_tol,
                        ErrorCode::DecompositionInvalid,
                        "f_A != p1 f_B + p2 h at atom " + std::to_string(x + 1));
        detail::require(std::abs(fb[x] * dec.h[x]) <= identity_tol, ErrorCode::DecompositionInvalid,
                        "f_B h != 0 at atom " + std::to_string(x + 1));
    }
    const StabilityReport stable = check_stable(space, d_b, n_max);
    detail::require(stable.is_stable, ErrorCode::NotStable, "the limit random set is not stable");

    Theorem2Table table;
    table.stable_level = stable.nonzero_value.value_or(1.0);
    const double h_peak = [&] {
        double m = 0.0;
        for (double v : dec.h) m = std::max(m, std::abs(v));
        return m;
    }();

    std::vector<double> fan(fa.values().begin(), fa.values().end());
    for (unsigned n = 1; n <= n_max; ++n) {
        if (n > 1) {
            for (std::size_t x = 0; x < fan.size(); ++x) fan[x] *= fa[x];
        }
        Theorem2Row row;
        row.n = n;
        row.kappa = detail::ipow(table.stable_level, n - 1);
        const double p1n = detail::ipow(dec.p1, n);
        const double p2n = detail::ipow(dec.p2, n);
        row.lambda = 1.0 / (row.kappa * p1n);
        row.premise_ratio = p2n / (row.kappa * p1n);
        row.bias_term = row.lambda * p1n * row.kappa - 1.0;
        row.decay_term = row.lambda * p2n * detail::ipow(h_peak, n);
        double err = 0.0;
        for (std::size_t x = 0; x < fan.size(); ++x) {
            err = std::max(err, std::abs(row.lambda * fan[x] - fb[x]));
        }
        row.sup_error = err;
        table.rows.push_back(row);
    }

    // The premise ratio is geometric; require it to shrink over the second
    // half of the range and to end below where it started.
    const auto& rows = table.rows;
    bool vanishing = rows.back().premise_ratio < rows.front().premise_ratio || rows.back().premise_ratio == 0.0;
    for (std::size_t k = rows.size() / 2; k + 1 < rows.size(); ++k) {
        if (rows[k + 1].premise_ratio > 0.0 && !(rows[k + 1].premise_ratio < rows[k].premise_ratio)) {
            vanishing = false;
        }
    }
    if (!vanishing) {
        detail::fail(ErrorCode::DecompositionInvalid,
                     "premise_ratio: p2^n/(kappa_n p1^n) does not vanish (n=1: " +
                         std::to_string(rows.front().premise_ratio) + ", n=" + std::to_string(n_max) +
                         ": " + std::to_string(rows.back().premise_ratio) + ")");
    }
    return table;
}

/// 1 - (1 - a)^n.
inline double xi_transform(double a, unsigned n) {
    detail::require(a > 0.0 && a < 1.0, ErrorCode::InvalidParameter, "a must lie in (0, 1)");
    detail::require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    if (n == 1) return a;
    return -std::expm1(static_cast<double>(n) * std::log1p(-a));
}

namespace detail {

inline void check_chain(const MeasureSpace& space, std::span<const FiniteSet> chain) {
    require(!chain.empty(), ErrorCode::InvalidParameter, "chain must contain at least one set");
    for (std::size_t k = 0; k < chain.size(); ++k) {
        space.check(chain[k]);
        if (k > 0) {
            require(chain[k - 1].is_subset_of(chain[k]) && chain[k - 1] != chain[k], ErrorCode::NotNested,
                    "chain element " + std::to_string(k) + " is not a proper subset of element " +
                        std::to_string(k + 1));
        }
    }
}

/// p_j = a(1-a)^{j-1} for j < J and the tail (1-a)^{J-1} on A_J; a in [0, 1].
inline std::vector<double> geometric_chain_probs(double a, std::size_t length) {
    std::vector<double> probs(length);
    double survive = 1.0;
    for (std::size_t j = 0; j + 1 < length; ++j) {
        probs[j] = a * survive;
        survive *= 1.0 - a;
    }
    probs[length - 1] = survive;
    return probs;
}

inline DiscreteRandomSet geometric_chain(std::span<const FiniteSet> chain, double a) {
    return make_random_set(std::vector<FiniteSet>(chain.begin(), chain.end()),
                           geometric_chain_probs(a, chain.size()));
}

}  // namespace detail

/// Geometric law on a strictly increasing chain A_1 ⊂ ... ⊂ A_J with the
/// tail beyond J absorbed into A_J.
inline DiscreteRandomSet make_geometric_chain(const MeasureSpace& space, std::span<const FiniteSet> chain,
                                              double a) {
    detail::require(a > 0.0 && a < 1.0, ErrorCode::InvalidParameter, "a must lie in (0, 1)");
    detail::check_chain(space, chain);
    return detail::geometric_chain(chain, a);
}

struct Theorem3Check {
    /// max_x |f_a^n(x) - f_{xi_n(a)}(x)| for n = 1..n_max.
    std::vector<double> deviation;
    double max_deviation = 0.0;
};

/// Compares f_a^n with the mean function of the chain at parameter xi_n(a).
inline Theorem3Check verify_theorem3(const MeasureSpace& space, std::span<const FiniteSet> chain, double a,
                                     unsigned n_max) {
    detail::require(n_max >= 1, ErrorCode::InvalidParameter, "n_max must be at least 1");
    const MeanFunction f = mean_function(make_geometric_chain(space, chain, a));
    Theorem3Check check;
    MeanFunction fn = f;
    for (unsigned n = 1; n <= n_max; ++n) {
        if (n > 1) fn = op_circ(f, fn);
        const MeanFunction transformed = mean_function(detail::geometric_chain(chain, xi_transform(a, n)));
        const double dev = detail::sup_abs_diff(fn.values(), transformed.values());
        check.deviation.push_back(dev);
        check.max_deviation = std::max(check.max_deviation, dev);
    }
    return check;
}

}  // namespace randset
