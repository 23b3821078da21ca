#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "randset/random_set.hpp"
#include "test_support.hpp"

using namespace randset;
using randset::testing::Gen;
using randset::testing::mf;

namespace {

FiniteSet atoms(std::size_t m, std::initializer_list<std::size_t> labels) {
    FiniteSet s(m);
    for (auto l : labels) s.insert(l - 1);
    return s;
}

const MeasureSpace uniform4 = MeasureSpace::uniform(4);

void expect_error(ErrorCode code, auto&& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

void expect_values_near(const MeanFunction& f, std::vector<double> expected, double tol = 1e-12) {
    ASSERT_EQ(f.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(f[i], expected[i], tol) << "atom " << i + 1;
}

}  // namespace

TEST(MakeRandomSet, CanonicalForm) {
    const auto d = make_random_set({atoms(4, {1, 2})}, {1.0});
    EXPECT_EQ(d.support_size(), 1u);

    const auto a = atoms(4, {2});
    const auto merged = make_random_set({a, a}, {0.3, 0.7});
    EXPECT_EQ(merged, make_random_set({a}, {1.0}));
    EXPECT_EQ(merged.probs()[0], 1.0);

    const auto dropped = make_random_set({atoms(4, {1}), atoms(4, {2}), atoms(4, {3})}, {0.5, 0.0, 0.5});
    EXPECT_EQ(dropped.support_size(), 2u);
    EXPECT_EQ(dropped.probability(atoms(4, {2})), 0.0);

    // Sorted by bit string regardless of input order.
    const auto sorted = make_random_set({atoms(4, {1}), atoms(4, {4})}, {0.4, 0.6});
    EXPECT_EQ(sorted.support()[0], atoms(4, {4}));
    EXPECT_DOUBLE_EQ(sorted.probs()[0], 0.6);
}

TEST(MakeRandomSet, Errors) {
    expect_error(ErrorCode::ProbabilitySumMismatch, [] { make_random_set({atoms(4, {1}), atoms(4, {2})}, {0.5, 0.6}); });
    expect_error(ErrorCode::NegativeProbability, [] { make_random_set({atoms(4, {1}), atoms(4, {2})}, {1.5, -0.5}); });
    expect_error(ErrorCode::DimensionMismatch, [] { make_random_set({atoms(4, {1}), FiniteSet(3)}, {0.5, 0.5}); });
    expect_error(ErrorCode::DimensionMismatch, [] { make_random_set({atoms(4, {1})}, {0.5, 0.5}); });
    // Within 1e-9 of one is accepted and renormalized.
    const auto d = make_random_set({atoms(4, {1}), atoms(4, {2})}, {0.5, 0.5 + 5e-10});
    EXPECT_NEAR(d.probs()[0] + d.probs()[1], 1.0, 1e-15);
}

TEST(MeanFunction, Examples) {
    const auto d = make_random_set({atoms(4, {1, 2}), atoms(4, {2, 3})}, {0.5, 0.5});
    expect_values_near(mean_function(uniform4, d), {0.5, 1.0, 0.5, 0.0});
    expect_values_near(mean_function(uniform4, DiscreteRandomSet::degenerate(uniform4.whole())), {1, 1, 1, 1});
    expect_values_near(mean_function(uniform4, DiscreteRandomSet::degenerate(uniform4.empty_set())), {0, 0, 0, 0});
    expect_error(ErrorCode::DimensionMismatch, [] {
        mean_function(MeasureSpace::uniform(3), DiscreteRandomSet::degenerate(FiniteSet(4)));
    });
    expect_error(ErrorCode::InvalidMeanFunction, [] { mf({0.5, 1.5}); });
}

TEST(NDistanceDouble, Examples) {
    Gen gen(21);
    const auto d = gen.distribution(4, 5);
    EXPECT_NEAR(n_distance_sq_double(uniform4, d, d), 0.0, 1e-15);
    const auto a = DiscreteRandomSet::degenerate(atoms(4, {1, 2}));
    const auto b = DiscreteRandomSet::degenerate(atoms(4, {2, 3}));
    EXPECT_DOUBLE_EQ(n_distance_sq_double(uniform4, a, b), 1.0);
    // Mean functions differ on atoms 1 and 3, so ∫(f-g)² = 0.5: the double sum is twice that.
    EXPECT_NEAR(std::pow(n_distance_p(uniform4, mean_function(a), mean_function(b), 2.0), 2), 0.5, 1e-12);
}

TEST(NDistanceP, Examples) {
    const auto f = mf({1, 1, 0, 0});
    const auto g = mf({0, 0, 1, 1});
    EXPECT_EQ(n_distance_p(uniform4, f, f, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(n_distance_p(uniform4, f, g, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(n_distance_p(uniform4, f, g, infinite_order), 1.0);
    EXPECT_DOUBLE_EQ(n_distance_p(uniform4, f, g, 1.0), 1.0);
    EXPECT_NEAR(n_distance_p(uniform4, mf({0.5, 0, 0, 0}), mf({0, 0, 0, 0}), 3.0), 0.5 * std::cbrt(0.25), 1e-15);
    expect_error(ErrorCode::InvalidOrder, [&] { n_distance_p(uniform4, f, g, 0.5); });
}

TEST(MeanKernel, Examples) {
    const auto ones = MeanFunction::constant(4, 1.0);
    const auto zeros = MeanFunction::constant(4, 0.0);
    EXPECT_DOUBLE_EQ(mean_kernel(uniform4, ones, ones), 1.0);
    EXPECT_EQ(mean_kernel(uniform4, mf({0.3, 0.2, 1, 0}), zeros), 0.0);
    EXPECT_DOUBLE_EQ(mean_kernel(uniform4, mf({0.5, 1, 0.5, 0}), mf({1, 0, 0, 0})), 0.125);
}

TEST(ComplementKernel, Examples) {
    const auto ones = MeanFunction::constant(4, 1.0);
    const auto zeros = MeanFunction::constant(4, 0.0);
    EXPECT_EQ(complement_kernel(uniform4, ones, ones), 0.0);
    EXPECT_DOUBLE_EQ(complement_kernel(uniform4, zeros, zeros), uniform4.total_mass());
    EXPECT_DOUBLE_EQ(complement_kernel(uniform4, mf({0.5, 1, 0.5, 0}), zeros), 0.5);
}

TEST(OpCirc, Examples) {
    const auto f = mf({0.2, 0.7, 1, 0});
    EXPECT_EQ(op_circ(f, MeanFunction::constant(4, 1.0)), f);
    EXPECT_EQ(op_circ(MeanFunction::indicator(atoms(4, {1, 2})), MeanFunction::indicator(atoms(4, {2, 3}))),
              MeanFunction::indicator(atoms(4, {2})));
    expect_values_near(op_circ(mf({0.5, 1, 0, 0}), mf({0.5, 0.5, 1, 0})), {0.25, 0.5, 0, 0});
    expect_error(ErrorCode::DimensionMismatch, [&] { op_circ(f, mf({1, 1})); });
}

TEST(OpStar, Examples) {
    EXPECT_EQ(op_star(MeanFunction::indicator(atoms(4, {1})), MeanFunction::indicator(atoms(4, {2}))),
              MeanFunction::indicator(atoms(4, {3, 4})));
    const auto f = mf({0.25, 0.5, 1, 0});
    expect_values_near(op_star(f, MeanFunction::constant(4, 0.0)), {0.75, 0.5, 0, 1});
    EXPECT_EQ(op_star(MeanFunction::constant(4, 1.0), f), MeanFunction::constant(4, 0.0));
}

TEST(IntersectIndependent, Examples) {
    const auto a = atoms(4, {1, 2, 3});
    const auto b = atoms(4, {2, 3, 4});
    EXPECT_EQ(intersect_independent(DiscreteRandomSet::degenerate(a), DiscreteRandomSet::degenerate(b)),
              DiscreteRandomSet::degenerate(atoms(4, {2, 3})));

    const auto coin = make_random_set({uniform4.empty_set(), uniform4.whole()}, {0.5, 0.5});
    const auto both = intersect_independent(coin, coin);
    EXPECT_DOUBLE_EQ(both.probability(uniform4.empty_set()), 0.75);
    EXPECT_DOUBLE_EQ(both.probability(uniform4.whole()), 0.25);

    Gen gen(22);
    const auto d = gen.distribution(4, 5);
    const auto same = intersect_independent(d, DiscreteRandomSet::degenerate(uniform4.whole()));
    ASSERT_EQ(same.support_size(), d.support_size());
    for (std::size_t j = 0; j < d.support_size(); ++j) {
        EXPECT_EQ(same.support()[j], d.support()[j]);
        EXPECT_NEAR(same.probs()[j], d.probs()[j], 1e-15);
    }
}

TEST(ConditionNonvalue, Examples) {
    const auto d = make_random_set({uniform4.empty_set(), atoms(4, {1})}, {0.5, 0.5});
    const auto c = condition_nonvalue(d, uniform4.empty_set());
    EXPECT_EQ(c, DiscreteRandomSet::degenerate(atoms(4, {1})));
    const auto f = mean_function(d);
    const auto g = mean_function(c);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g[i], 2.0 * f[i]);

    const auto zero_atom = make_random_set({atoms(4, {1}), atoms(4, {2})}, {1.0, 0.0});
    expect_error(ErrorCode::NotInSupport, [&] { condition_nonvalue(zero_atom, atoms(4, {2})); });
    expect_error(ErrorCode::TotalMassRemoved,
                 [&] { condition_nonvalue(DiscreteRandomSet::degenerate(uniform4.empty_set()), uniform4.empty_set()); });
}

TEST(ConditionNonvalue, ScalesMeanFunction) {
    Gen gen(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FiniteSet> sets{FiniteSet(6)};
        for (std::size_t k = 0; k < 4; ++k) sets.push_back(gen.set(6, 0.6));
        const auto d = make_random_set(sets, gen.simplex(sets.size()));
        const double p = d.probability(FiniteSet(6));
        if (p <= 0.0 || p >= 1.0 || d.support_size() < 2) continue;
        const auto f = mean_function(d);
        const auto g = mean_function(condition_nonvalue(d, FiniteSet(6)));
        for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(g[i], f[i] / (1.0 - p), 1e-12);
    }
}

TEST(Sample, DegenerateAndDeterministic) {
    const auto a = atoms(4, {2, 4});
    EXPECT_EQ(sample(DiscreteRandomSet::degenerate(a), 99, 3), (std::vector<FiniteSet>{a, a, a}));

    Gen gen(24);
    const auto d = gen.distribution(5, 6);
    EXPECT_EQ(sample(d, 7, 50), sample(d, 7, 50));
    EXPECT_NE(sample(d, 7, 50), sample(d, 8, 50));
    expect_error(ErrorCode::InvalidParameter, [&] { sample(d, 7, 0); });
}

TEST(Sample, FrequencyConcentrates) {
    const auto coin = make_random_set({uniform4.empty_set(), uniform4.whole()}, {0.5, 0.5});
    const auto draws = sample(coin, 2024, 10000);
    const auto hits = std::count(draws.begin(), draws.end(), uniform4.whole());
    EXPECT_NEAR(static_cast<double>(hits) / 10000.0, 0.5, 0.02);
}

TEST(Sample, StreamMatchesReferenceSplitMix64) {
    // Textbook SplitMix64 written out independently of the library.
    struct Reference {
        std::uint64_t state;
        std::uint64_t next() {
            std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        }
    };
    for (std::uint64_t key : {0ULL, 1ULL, 0xDEADBEEFULL, ~0ULL}) {
        CounterRng rng(key);
        Reference ref{key};
        for (int i = 0; i < 100; ++i) EXPECT_EQ(rng(), ref.next());
    }
    // splitmix64(0) first output, a widely published constant.
    EXPECT_EQ(CounterRng(0)(), 0xE220A8397B1DCDAFULL);
}

TEST(NonInjectivity, DistinctLawsShareAMeanFunction) {
    const auto a = atoms(4, {1, 3});
    const auto d1 = make_random_set({a, complement(a)}, {0.5, 0.5});
    const auto d2 = make_random_set({uniform4.whole(), uniform4.empty_set()}, {0.5, 0.5});
    EXPECT_EQ(mean_function(d1), mean_function(d2));
    EXPECT_NE(d1, d2);
    EXPECT_EQ(n_distance(uniform4, mean_function(d1), mean_function(d2)), 0.0);
}

// ---- properties -------------------------------------------------------------

TEST(Properties, DoubleSumIsTwiceSquaredL2) {
    Gen gen(31);
    for (int trial = 0; trial < 500; ++trial) {
        const auto space = gen.space(6, gen.coin());
        const auto dm = gen.distribution(space.size(), 6);
        const auto dn = gen.distribution(space.size(), 6);
        const double n2 = n_distance(space, mean_function(dm), mean_function(dn));
        const double dbl = n_distance_sq_double(space, dm, dn);
        EXPECT_NEAR(dbl, 2.0 * n2 * n2, 1e-12);
        EXPECT_GE(dbl, -1e-12);
    }
}

TEST(Properties, NDistanceIsAMetric) {
    Gen gen(32);
    for (int trial = 0; trial < 500; ++trial) {
        const auto space = gen.space(6);
        const auto f = mean_function(gen.distribution(space.size(), 4));
        const auto g = mean_function(gen.distribution(space.size(), 4));
        const auto h = mean_function(gen.distribution(space.size(), 4));
        EXPECT_LE(n_distance(space, f, h), n_distance(space, f, g) + n_distance(space, g, h) + 1e-12);
        EXPECT_EQ(n_distance(space, f, g) == 0.0, f == g);
        EXPECT_DOUBLE_EQ(n_distance(space, f, g), n_distance(space, g, f));
    }
}

TEST(Properties, SquaredNDistanceIsNegativeDefinite) {
    Gen gen(33);
    for (int trial = 0; trial < 500; ++trial) {
        const auto space = gen.space(6);
        const std::size_t n = gen.index(2, 8);
        std::vector<MeanFunction> fs;
        for (std::size_t k = 0; k < n; ++k) fs.push_back(mean_function(gen.distribution(space.size(), 4)));
        const auto c = gen.zero_sum(n);
        double form = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) form += std::pow(n_distance(space, fs[i], fs[j]), 2) * c[i] * c[j];
        }
        EXPECT_LE(form, 1e-12);
    }
}

TEST(Properties, MeanKernelGramIsPositiveSemidefinite) {
    Gen gen(34);
    for (int trial = 0; trial < 200; ++trial) {
        const auto space = gen.space(6);
        const std::size_t n = gen.index(1, 8);
        std::vector<MeanFunction> fs;
        for (std::size_t k = 0; k < n; ++k) fs.push_back(mean_function(gen.distribution(space.size(), 4)));
        Eigen::MatrixXd gram(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mean_kernel(space, fs[i], fs[j]);
            }
        }
        EXPECT_TRUE(gram.isApprox(gram.transpose(), 0.0));
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
    }
}

TEST(Properties, IntersectionRealizesCircProduct) {
    Gen gen(35);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = gen.index(1, 8);
        const auto dm = gen.distribution(m, 5);
        const auto dn = gen.distribution(m, 5);
        const auto lhs = mean_function(intersect_independent(dm, dn));
        const auto rhs = op_circ(mean_function(dm), mean_function(dn));
        for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12);
    }
}

TEST(Properties, StarIsCircOfComplements) {
    Gen gen(36);
    for (int trial = 0; trial < 200; ++trial) {
        const auto space = gen.space(8);
        const auto f = mean_function(gen.distribution(space.size(), 5));
        const auto g = mean_function(gen.distribution(space.size(), 5));
        EXPECT_EQ(op_star(f, g), op_circ(f.complement(), g.complement()));
        EXPECT_NEAR(complement_kernel(space, f, g), mean_kernel(space, f.complement(), g.complement()), 1e-15);
        // On indicators the star product is the complement of the union.
        const auto a = gen.set(space.size());
        const auto b = gen.set(space.size());
        EXPECT_EQ(op_star(MeanFunction::indicator(a), MeanFunction::indicator(b)),
                  MeanFunction::indicator(complement(unite(a, b))));
    }
}

TEST(Properties, CircIsACommutativeMonoid) {
    Gen gen(37);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = gen.index(1, 8);
        const auto f = mean_function(gen.distribution(m, 4));
        const auto g = mean_function(gen.distribution(m, 4));
        const auto h = mean_function(gen.distribution(m, 4));
        EXPECT_EQ(op_circ(f, g), op_circ(g, f));
        const auto l = op_circ(op_circ(f, g), h);
        const auto r = op_circ(f, op_circ(g, h));
        for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(l[i], r[i], 1e-15);
    }
}

TEST(Properties, SupNormIsTheLimitOfLp) {
    Gen gen(38);
    for (int trial = 0; trial < 300; ++trial) {
        const auto space = gen.space(8);
        const auto f = mean_function(gen.distribution(space.size(), 4));
        const auto g = mean_function(gen.distribution(space.size(), 4));
        const double sup = n_distance_p(space, f, g, infinite_order);
        EXPECT_LE(std::abs(n_distance_p(space, f, g, 64.0) - sup), 0.1 * sup + 1e-9);
    }
}

TEST(Properties, BalanceFormMatchesSquaredDistance) {
    // ∫(f² - fg) - ∫(fg - g²) = ∫(f - g)², so the two-sided balance holds iff N = 0.
    Gen gen(39);
    for (int trial = 0; trial < 300; ++trial) {
        const auto space = gen.space(8);
        const auto f = mean_function(gen.distribution(space.size(), 5));
        const auto g = gen.coin(0.2) ? f : mean_function(gen.distribution(space.size(), 5));
        const double lhs = mean_kernel(space, f, f) - mean_kernel(space, f, g);
        const double rhs = mean_kernel(space, f, g) - mean_kernel(space, g, g);
        EXPECT_NEAR(lhs - rhs, std::pow(n_distance(space, f, g), 2), 1e-12);
        if (f == g) {
            EXPECT_NEAR(lhs, rhs, 1e-15);
        }
    }
}
