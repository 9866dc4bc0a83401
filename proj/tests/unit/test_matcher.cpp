#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "teamflow/error.hpp"
#include "teamflow/matcher.hpp"

using namespace teamflow;
using namespace teamflow::matching;

namespace {

std::vector<double> axis(std::size_t d, double v, std::size_t dims = 6) {
    std::vector<double> out(dims, 0.0);
    out[d] = v;
    return out;
}

// Direct transcription of the greedy rule: sort by (-total, repo), then for
// each pick argmin over unused of (distance, repo).
std::vector<MatchedPair> oracle_greedy(std::vector<TeamVector> minority, const std::vector<TeamVector>& majority) {
    auto total = [](const TeamVector& t) { return std::accumulate(t.counts.begin(), t.counts.end(), 0.0); };
    std::sort(minority.begin(), minority.end(), [&](const TeamVector& a, const TeamVector& b) {
        return std::make_pair(-total(a), a.repo_id) < std::make_pair(-total(b), b.repo_id);
    });
    std::set<std::size_t> used;
    std::vector<MatchedPair> out;
    for (const auto& q : minority) {
        std::pair<double, RepoId> best{std::numeric_limits<double>::infinity(), 0};
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < majority.size(); ++j) {
            if (used.contains(j)) continue;
            double s = 0;
            for (std::size_t d = 0; d < q.counts.size(); ++d) s += std::pow(q.counts[d] - majority[j].counts[d], 2);
            const std::pair<double, RepoId> key{std::sqrt(s), majority[j].repo_id};
            if (key < best) {
                best = key;
                best_j = j;
            }
        }
        used.insert(best_j);
        out.push_back({q.repo_id, best.second, best.first});
    }
    return out;
}

// Minimum total distance over every injective assignment (small inputs only).
double optimal_total(const std::vector<TeamVector>& minority, const std::vector<TeamVector>& majority) {
    std::vector<std::size_t> idx(majority.size());
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0;
        for (std::size_t i = 0; i < minority.size(); ++i) s += euclidean(minority[i].counts, majority[idx[i]].counts);
        best = std::min(best, s);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

std::vector<TeamVector> random_group(std::mt19937& rng, std::size_t n, RepoId base, int max_count) {
    std::vector<TeamVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        TeamVector t{base + static_cast<RepoId>(i), std::vector<double>(6)};
        for (auto& c : t.counts) c = static_cast<double>(rng() % (max_count + 1));
        out.push_back(t);
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

}  // namespace

TEST_CASE("exact match is taken") {
    const auto pairs = match_teams({{1, axis(0, 2)}}, {{10, axis(0, 2)}, {11, std::vector<double>(6, 9.0)}});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].majority_repo_id == 10);
    CHECK(pairs[0].distance == 0.0);
}

TEST_CASE("axis-aligned neighbours, agreeing with brute force over all assignments") {
    const std::vector<TeamVector> minority = {{1, axis(0, 4)}, {2, axis(1, 4)}};
    const std::vector<TeamVector> majority = {{10, axis(0, 3)}, {11, axis(1, 3)}, {12, std::vector<double>(6, 10.0)}};
    const auto pairs = match_teams(minority, majority);
    REQUIRE(pairs.size() == 2);
    std::map<RepoId, RepoId> got;
    for (const auto& p : pairs) {
        got[p.minority_repo_id] = p.majority_repo_id;
        CHECK(p.distance == doctest::Approx(1.0));
    }
    CHECK(got == std::map<RepoId, RepoId>{{1, 10}, {2, 11}});
    CHECK(pairs[0].distance + pairs[1].distance == doctest::Approx(optimal_total(minority, majority)));
}

TEST_CASE("ties go to the smaller repo id; processing order by total then repo id") {
    const auto pairs = match_teams({{5, axis(0, 1)}, {3, axis(0, 1)}, {9, axis(0, 5)}},
                                   {{40, axis(0, 0)}, {20, axis(0, 2)}, {30, axis(0, 0)}, {50, axis(0, 2)}});
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].minority_repo_id == 9);
    CHECK(pairs[0].majority_repo_id == 20);  // 20 and 50 are equidistant
    CHECK(pairs[1].minority_repo_id == 3);
    CHECK(pairs[1].majority_repo_id == 30);  // 30, 40, 50 all at distance 1
    CHECK(pairs[2].minority_repo_id == 5);
    CHECK(pairs[2].majority_repo_id == 40);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(match_teams({{1, axis(0, 1)}, {2, axis(0, 1)}}, {{3, axis(0, 1)}}), Error);
    try {
        match_teams({{1, axis(0, 1)}, {2, axis(0, 1)}}, {{3, axis(0, 1)}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MajorityExhausted);
    }
    CHECK(match_teams({}, {{3, axis(0, 1)}}).empty());
    CHECK_THROWS_AS(match_teams({{1, axis(0, 1, 6)}}, {{3, axis(0, 1, 7)}}), Error);
}

TEST_CASE("randomized: greedy oracle, without replacement, determinism, threads") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nmin = 1 + rng() % 12;
        const auto minority = random_group(rng, nmin, 1000, 1 + static_cast<int>(rng() % 6));
        const auto majority = random_group(rng, nmin + rng() % 12, 5000, 1 + static_cast<int>(rng() % 6));
        const auto pairs = match_teams(minority, majority);
        CHECK(pairs.size() == minority.size());
        const auto expected = oracle_greedy(minority, majority);
        REQUIRE(pairs.size() == expected.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            CHECK(pairs[i].minority_repo_id == expected[i].minority_repo_id);
            CHECK(pairs[i].majority_repo_id == expected[i].majority_repo_id);
            CHECK(pairs[i].distance == doctest::Approx(expected[i].distance));
        }
        std::set<RepoId> maj;
        for (const auto& p : pairs) maj.insert(p.majority_repo_id);
        CHECK(maj.size() == pairs.size());
        CHECK(match_teams(minority, majority) == pairs);
    }

    // large majority exercises the parallel scan
    const auto minority = random_group(rng, 50, 1, 20);
    const auto majority = random_group(rng, 6000, 100000, 20);
    CHECK(match_teams(minority, majority, 4) == match_teams(minority, majority, 1));
}

TEST_CASE("majority containing copies of the minority gives distance 0 everywhere") {
    std::mt19937 rng(23);
    auto minority = random_group(rng, 30, 1, 10);
    auto majority = random_group(rng, 40, 500, 10);
    for (const auto& t : minority) majority.push_back({t.repo_id + 10000, t.counts});
    for (const auto& p : match_teams(minority, majority)) CHECK(p.distance == 0.0);
}

TEST_CASE("median_table") {
    const std::vector<std::vector<double>> one = {{1, 2, 3}};
    const std::vector<std::vector<double>> two = {{1, 0, 0}, {3, 0, 1}};
    const auto t = median_table(one, two, one, {"a", "b", "c"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].minority == 1);
    CHECK(t.rows[0].majority_all == 2.0);
    CHECK(t.rows[2].majority_all == 0.5);
    CHECK(t.rows[2].majority_matched == 3);
    CHECK_THROWS_AS(median_table({}, two, one, {"a", "b", "c"}), Error);
    CHECK_THROWS_AS(median_table(one, two, one, {"a"}), Error);
}

TEST_CASE("matching narrows the per-type median gap") {
    std::mt19937 rng(5);
    // minority: heavier, PR-rich teams; majority: mostly small teams
    std::vector<TeamVector> minority, majority;
    for (RepoId i = 0; i < 60; ++i) {
        minority.push_back({i, {double(8 + rng() % 8), double(6 + rng() % 6), double(rng() % 3), double(4 + rng() % 5),
                                double(1 + rng() % 3), double(rng() % 3)}});
    }
    for (RepoId i = 0; i < 600; ++i) {
        majority.push_back({1000 + i, {double(2 + rng() % 14), double(rng() % 12), double(rng() % 2),
                                       double(rng() % 9), double(rng() % 5), double(rng() % 2)}});
    }
    const auto pairs = match_teams(minority, majority);
    std::map<RepoId, std::vector<double>> by;
    for (const auto& t : majority) by[t.repo_id] = t.counts;
    std::vector<std::vector<double>> a, b, c;
    for (const auto& t : minority) a.push_back(t.counts);
    for (const auto& t : majority) b.push_back(t.counts);
    for (const auto& p : pairs) c.push_back(by[p.majority_repo_id]);
    const auto t = median_table(a, b, c, {"Push", "PullRequest", "Issues", "IssueComment", "Create", "Delete"});
    for (const auto& r : t.rows) {
        CAPTURE(r.label);
        CHECK(std::abs(r.majority_matched - r.minority) <= std::abs(r.majority_all - r.minority));
    }
}
