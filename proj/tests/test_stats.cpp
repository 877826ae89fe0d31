#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sharpbound/rng.hpp"
#include "sharpbound/stats.hpp"

using namespace sharpbound;

TEST_CASE("macro F1") {
    const std::vector<int> truth{0, 0, 1, 1};
    CHECK(macro_f1(truth, truth) == 1.0);

    const std::vector<int> all_ones{1, 1, 1, 1};
    // class 1: precision 1/2, recall 1 -> 2/3; class 0 never predicted -> 0
    CHECK(macro_f1(all_ones, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const std::vector<int> inverted{1, 1, 0, 0};
    CHECK(macro_f1(inverted, truth) == 0.0);

    // a class missing from both sides scores 1 by convention
    const std::vector<int> only_zero{0, 0};
    CHECK(macro_f1(only_zero, only_zero) == 1.0);

    CHECK_THROWS_AS(macro_f1(std::vector<int>{0}, truth), std::invalid_argument);
}

TEST_CASE("mann-whitney exact path") {
    const std::vector<double> low{1.0, 2.0, 3.0};
    const std::vector<double> high{10.0, 11.0, 12.0};
    const MannWhitneyResult r = mann_whitney_u(low, high);
    CHECK(r.u == 0.0);
    CHECK(r.p_two_sided == doctest::Approx(0.1).epsilon(1e-12));  // 2 of C(6,3)=20

    const std::vector<double> same{5.0, 6.0, 7.0};
    const MannWhitneyResult eq = mann_whitney_u(same, same);
    CHECK(eq.p_two_sided == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(mann_whitney_u({}, same), std::invalid_argument);
}

TEST_CASE("mann-whitney normal approximation on disjoint large samples") {
    Rng rng(157);
    std::vector<double> a(40), b(40);
    for (double& x : a) x = rng.uniform(0.0, 1.0);
    for (double& x : b) x = rng.uniform(10.0, 11.0);
    const MannWhitneyResult r = mann_whitney_u(a, b);
    CHECK(r.u == 0.0);
    CHECK(r.p_two_sided < 1e-3);

    // identical distributions: p should not be small
    std::vector<double> c(40);
    for (double& x : c) x = rng.uniform(0.0, 1.0);
    CHECK(mann_whitney_u(a, c).p_two_sided > 0.01);
}

TEST_CASE("mann-whitney handles ties via midranks") {
    const std::vector<double> a{1.0, 1.0, 2.0, 13.0, 2.0, 2.0, 2.0, 2.0, 3.0};
    const std::vector<double> b{1.0, 2.0, 3.0, 3.0, 3.0, 12.0, 4.0, 4.0, 4.0};
    const MannWhitneyResult r = mann_whitney_u(a, b);
    CHECK(r.p_two_sided >= 0.0);
    CHECK(r.p_two_sided <= 1.0);
    // symmetric call flips U around its mean
    const MannWhitneyResult flipped = mann_whitney_u(b, a);
    CHECK(r.u + flipped.u == doctest::Approx(81.0).epsilon(1e-12));  // n_a * n_b
    CHECK(r.p_two_sided == doctest::Approx(flipped.p_two_sided).epsilon(1e-12));
}

TEST_CASE("spearman correlation") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> y{2.0, 4.0, 6.0, 8.0, 10.0};
    CHECK(spearman_correlation(x, y) == doctest::Approx(1.0));
    std::vector<double> reversed(y.rbegin(), y.rend());
    CHECK(spearman_correlation(x, reversed) == doctest::Approx(-1.0));

    // monotone in rank even when wildly nonlinear in value
    const std::vector<double> exploded{0.1, 10.0, 11.0, 1e6, 1e7};
    CHECK(spearman_correlation(x, exploded) == doctest::Approx(1.0));

    const std::vector<double> flat{3.0, 3.0, 3.0, 3.0, 3.0};
    CHECK(std::isnan(spearman_correlation(x, flat)));
}

TEST_CASE("median") {
    CHECK(median(std::vector<double>{3.0, 1.0, 2.0}) == 2.0);
    CHECK(median(std::vector<double>{4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(std::isnan(median(std::vector<double>{})));
}
