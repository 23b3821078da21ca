// A tour of the library on the four-point uniform space: distances between
// sets and between random sets, a stability check, and a permutation test.

#include <cstdio>
#include <vector>

#include "randset/randset.hpp"

using namespace randset;

static FiniteSet set_of(std::initializer_list<std::size_t> atoms) {
    FiniteSet s(4);
    for (auto i : atoms) s.insert(i - 1);
    return s;
}

int main() {
    const MeasureSpace space = MeasureSpace::uniform(4);
    const FiniteSet a = set_of({1, 2});
    const FiniteSet b = set_of({2, 3});

    std::printf("sets %s and %s\n", a.to_bits().c_str(), b.to_bits().c_str());
    std::printf("  mu(A delta B) = %.4f, d = %.4f, cos = %.4f\n", kernel_L(space, a, b), dist(space, a, b, 2.0),
                cos_angle(space, a, b));

    const auto proj = project(space, a, std::vector<FiniteSet>{set_of({1}), set_of({3, 4})});
    std::printf("  projection onto {1},{3,4}: [%.3f, %.3f], residual %.3f\n", proj.coefficients[0],
                proj.coefficients[1], proj.residual);

    const auto da = make_random_set({a, b}, {0.5, 0.5});
    const auto db = make_random_set({set_of({3, 4}), space.whole()}, {0.7, 0.3});
    const auto fa = mean_function(space, da);
    const auto fb = mean_function(space, db);
    std::printf("mean functions (%.2f %.2f %.2f %.2f) and (%.2f %.2f %.2f %.2f)\n", fa[0], fa[1], fa[2], fa[3], fb[0],
                fb[1], fb[2], fb[3]);
    std::printf("  N = %.4f, sup distance = %.4f\n", n_distance(space, fa, fb), n_distance_p(space, fa, fb, infinite_order));

    const auto halves = make_random_set({a, complement(a)}, {0.5, 0.5});
    const auto report = check_stable(space, halves, 4);
    std::printf("{A, complement A} stable: %s, kappa_2..4 =", report.is_stable ? "yes" : "no");
    for (double k : report.kappa) std::printf(" %.4f", k);
    std::printf("\n");

    const SetSample first{sample(da, 1, 15), "A"};
    const SetSample second{sample(db, 2, 15), "B"};
    const TestResult r = permutation_test(space, first, second, 999, 3);
    std::printf("permutation test, n = 15: statistic %.4f, p = %.4f\n", r.statistic, r.p_value);
    return 0;
}
