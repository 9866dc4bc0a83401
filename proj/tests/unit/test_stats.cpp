#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "teamflow/error.hpp"
#include "teamflow/stats.hpp"

using namespace teamflow;
using namespace teamflow::stats;

namespace {

// Tie-free samples whose pooled ranks put `ranks` in a.
std::pair<std::vector<double>, std::vector<double>> split(std::size_t n, const std::vector<std::size_t>& ranks) {
    std::vector<double> a, b;
    for (std::size_t r = 1; r <= n; ++r) {
        const double v = 0.25 * static_cast<double>(r) + 3.0;
        (std::find(ranks.begin(), ranks.end(), r) != ranks.end() ? a : b).push_back(v);
    }
    return {a, b};
}

std::vector<double> draw(std::mt19937& rng, std::size_t n, int levels, double shift = 0.0) {
    std::vector<double> out(n);
    for (auto& v : out) v = static_cast<double>(rng() % static_cast<unsigned>(levels)) + shift;
    return out;
}

}  // namespace

TEST_CASE("two-by-two reference value") {
    const std::vector<double> a = {1, 2}, b = {3, 4};
    const auto r = mann_whitney_u(a, b);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.method == UTestMethod::Exact);
    CHECK(r.p_two_sided == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(mann_whitney_u(b, a).u_statistic == 4.0);
}

TEST_CASE("exact route agrees with enumeration on every tie-free pair up to n=10") {
    std::size_t cases = 0;
    for (std::size_t n = 2; n <= kExactMaxTotal; ++n) {
        for (std::size_t n1 = 1; n1 < n; ++n1) {
            oracle::for_each_subset(n, n1, [&](const std::vector<std::size_t>& ranks) {
                const auto [a, b] = split(n, ranks);
                const auto r = mann_whitney_u(a, b);
                REQUIRE(r.method == UTestMethod::Exact);
                CHECK(r.u_statistic == oracle::u_pairs(a, b));
                CHECK(r.p_two_sided == doctest::Approx(oracle::exact_p(a, b)).epsilon(1e-12));
                ++cases;
            });
        }
    }
    CHECK(cases > 1000);
}

TEST_CASE("exact_u_counts: sums to the binomial coefficient and is symmetric") {
    for (std::size_t n1 = 0; n1 <= 8; ++n1) {
        for (std::size_t n2 = 0; n2 <= 8; ++n2) {
            const auto c = exact_u_counts(n1, n2);
            REQUIRE(c.size() == n1 * n2 + 1);
            double binom = 1;
            for (std::size_t i = 1; i <= n1; ++i) binom = binom * static_cast<double>(n2 + i) / static_cast<double>(i);
            CHECK(std::accumulate(c.begin(), c.end(), 0.0) == doctest::Approx(binom));
            for (std::size_t u = 0; u < c.size(); ++u) CHECK(c[u] == c[c.size() - 1 - u]);
        }
    }
}

TEST_CASE("normal route with ties agrees with the oracle") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 400; ++trial) {
        const auto a = draw(rng, 1 + rng() % 30, 1 + static_cast<int>(rng() % 6));
        const auto b = draw(rng, 1 + rng() % 30, 1 + static_cast<int>(rng() % 6));
        const auto r = mann_whitney_u(a, b);
        CHECK(r.u_statistic == oracle::u_pairs(a, b));
        CHECK(r.p_two_sided == doctest::Approx(oracle::mwu_p(a, b)).epsilon(1e-9));
        CHECK(r.method == (oracle::has_ties(a, b) || a.size() + b.size() > kExactMaxTotal ? UTestMethod::NormalApprox
                                                                                          : UTestMethod::Exact));
        CHECK(mann_whitney_u_normal(a, b).p_two_sided == doctest::Approx(oracle::normal_p(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("U symmetry and p in range") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = draw(rng, 1 + rng() % 15, 8), b = draw(rng, 1 + rng() % 15, 8);
        const auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
        CHECK(ab.u_statistic + ba.u_statistic == doctest::Approx(static_cast<double>(a.size() * b.size())));
        CHECK(ab.p_two_sided == doctest::Approx(ba.p_two_sided));
        CHECK(ab.p_two_sided > 0.0);
        CHECK(ab.p_two_sided <= 1.0);
    }
}

TEST_CASE("identical constant samples give p = 1") {
    const std::vector<double> a(7, 2.0), b(9, 2.0);
    const auto r = mann_whitney_u(a, b);
    CHECK(r.p_two_sided == 1.0);
    CHECK(r.u_statistic == 31.5);
}

TEST_CASE("extreme separation stays positive") {
    std::vector<double> a(3000), b(3000);
    std::iota(a.begin(), a.end(), 0.0);
    std::iota(b.begin(), b.end(), 10000.0);
    const auto r = mann_whitney_u(a, b);
    CHECK(r.p_two_sided > 0.0);
    CHECK(r.p_two_sided <= 1e-300);
}

TEST_CASE("shifting b upward never raises the one-sided p of b > a") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = draw(rng, 20, 10);
        const auto base = draw(rng, 20, 10);
        double last = 1.1;
        for (double shift = 0.0; shift <= 10.0; shift += 0.5) {
            auto b = base;
            for (auto& v : b) v += shift;
            const double p = mann_whitney_p_greater(b, a);
            CHECK(p <= last + 1e-12);
            last = p;
        }
    }
}

TEST_CASE("normal approximation against exact for small samples") {
    // Record the largest gap per size regime; the tight bound only holds once
    // both samples have at least three values.
    double worst_all = 0.0, worst_ge3 = 0.0;
    for (std::size_t n = 2; n <= kExactMaxTotal; ++n) {
        for (std::size_t n1 = 1; n1 < n; ++n1) {
            oracle::for_each_subset(n, n1, [&](const std::vector<std::size_t>& ranks) {
                const auto [a, b] = split(n, ranks);
                const double gap = std::abs(mann_whitney_u_normal(a, b).p_two_sided - mann_whitney_u(a, b).p_two_sided);
                worst_all = std::max(worst_all, gap);
                if (n1 >= 3 && n - n1 >= 3) worst_ge3 = std::max(worst_ge3, gap);
            });
        }
    }
    CHECK(worst_ge3 <= 0.05);
    CHECK(worst_all > 0.05);
}

TEST_CASE("invalid inputs") {
    const std::vector<double> empty, one = {1.0}, nan = {std::nan("")};
    CHECK_THROWS_AS(mann_whitney_u(empty, one), Error);
    CHECK_THROWS_AS(mann_whitney_u(one, nan), Error);
}

TEST_CASE("midranks") {
    const std::vector<double> v = {3, 1, 3, 2, 3};
    CHECK(midranks(v) == std::vector<double>{4, 1, 4, 2, 4});
}

TEST_CASE("run lengths") {
    using E = EventType;
    const std::vector<E> s = {E::IssueComment, E::IssueComment, E::Push, E::IssueComment};
    CHECK(issue_comment_runs(s) == std::vector<std::size_t>{2, 1});
    CHECK(run_length_mean(s) == 1.5);
    CHECK_FALSE(run_length_mean(std::vector<E>{E::Push, E::PullRequest}).has_value());
    CHECK(run_length_mean(std::vector<E>{E::IssueComment}) == 1.0);
    // other comment types interrupt a run
    CHECK(issue_comment_runs(std::vector<E>{E::IssueComment, E::CommitComment, E::IssueComment}) ==
          std::vector<std::size_t>{1, 1});
}

TEST_CASE("compare_run_lengths: clustered beats interspersed") {
    using E = EventType;
    std::mt19937 rng(2);
    std::vector<std::vector<E>> clustered, interspersed;
    for (int t = 0; t < 40; ++t) {
        std::vector<E> c, i;
        const int comments = 6 + static_cast<int>(rng() % 6);
        c.insert(c.end(), 3, E::Push);
        c.insert(c.end(), static_cast<std::size_t>(comments), E::IssueComment);
        c.insert(c.end(), 3, E::PullRequest);
        for (int k = 0; k < comments; ++k) {
            i.push_back(E::IssueComment);
            i.push_back(k % 2 ? E::Push : E::PullRequest);
        }
        clustered.push_back(c);
        interspersed.push_back(i);
    }
    const auto r = compare_run_lengths(clustered, interspersed);
    CHECK(r.direction == Direction::FirstHigher);
    CHECK(r.test.p_two_sided < 0.01);
    CHECK(r.teams_a == 40);
    CHECK(r.median_b == 1.0);

    const auto pooled = compare_run_lengths(clustered, interspersed, RunLengthMode::PooledRuns);
    CHECK(pooled.direction == Direction::FirstHigher);
    CHECK(compare_run_lengths(interspersed, clustered).direction == Direction::SecondHigher);

    std::vector<std::vector<E>> silent = {{E::Push, E::Push}};
    CHECK_THROWS_AS(compare_run_lengths(clustered, silent), Error);
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("proportions") {
    using E = EventType;
    const std::vector<E> types = {E::Push, E::Push, E::PullRequest, E::Watch, E::Push, E::PullRequest, E::Issues,
                                  E::Watch};
    const auto rows = proportions(types);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].type == E::Push);
    CHECK(rows[0].count == 3);
    CHECK(rows[0].percent == doctest::Approx(37.5));
    // PullRequest and Watch both have 2; enum order decides
    CHECK(rows[1].type == E::PullRequest);
    CHECK(rows[2].type == E::Watch);
    CHECK(rows[3].percent == doctest::Approx(12.5));
    CHECK_THROWS_AS(proportions(std::vector<E>{}), Error);

    std::mt19937 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<E> t(1 + rng() % 200);
        for (auto& x : t) x = kAllEventTypes[rng() % kAllEventTypes.size()];
        const auto r = proportions(t);
        double total = 0;
        std::size_t count = 0;
        for (const auto& row : r) {
            total += row.percent;
            count += row.count;
            CHECK(row.count > 0);
        }
        CHECK(total == doctest::Approx(100.0));
        CHECK(count == t.size());
        CHECK(std::is_sorted(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.count > y.count; }));
    }
}
