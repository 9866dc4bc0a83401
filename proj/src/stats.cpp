#include "teamflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "teamflow/error.hpp"

namespace teamflow::stats {

namespace {

struct RankSums {
    double rank_sum_a = 0.0;
    double tie_term = 0.0;  // sum over tie groups of t^3 - t
    bool has_ties = false;
};

RankSums rank_sums(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());

    for (double v : pooled) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite sample value");
    }

    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });

    RankSums out;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
        const double t = static_cast<double>(j - i);
        const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        if (t > 1) {
            out.has_ties = true;
            out.tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (order[k] < a.size()) out.rank_sum_a += rank;
        }
        i = j;
    }
    return out;
}

void check_nonempty(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "both samples need at least one value");
}

double clamp_p(double p) {
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct Moments {
    double mean;
    double sd;
};

Moments u_moments(double n1, double n2, double tie_term) {
    const double n = n1 + n2;
    double var = n1 * n2 / 12.0 * (n + 1.0);
    if (n > 1.0) var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    return {0.5 * n1 * n2, std::sqrt(std::max(var, 0.0))};
}

UTestResult normal_route(std::size_t n1, std::size_t n2, double u, double tie_term) {
    const auto [mean, sd] = u_moments(static_cast<double>(n1), static_cast<double>(n2), tie_term);
    UTestResult r{u, 1.0, n1, n2, UTestMethod::NormalApprox};
    if (sd > 0.0) {
        const double z = std::max(std::abs(u - mean) - 0.5, 0.0) / sd;
        r.p_two_sided = clamp_p(2.0 * normal_sf(z));
    }
    return r;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2) {
    // counts[m][u] for samples of size (m, n) built up over n = 0..n2.
    // Recurrence: f(m, n, u) = f(m-1, n, u-n) + f(m, n-1, u).
    const std::size_t max_u = n1 * n2;
    std::vector<std::vector<double>> prev(n1 + 1, std::vector<double>(max_u + 1, 0.0));
    for (std::size_t m = 0; m <= n1; ++m) prev[m][0] = 1.0;  // n = 0
    for (std::size_t n = 1; n <= n2; ++n) {
        std::vector<std::vector<double>> cur(n1 + 1, std::vector<double>(max_u + 1, 0.0));
        cur[0][0] = 1.0;
        for (std::size_t m = 1; m <= n1; ++m) {
            for (std::size_t u = 0; u <= m * n; ++u) {
                double v = prev[m][u];
                if (u >= n) v += cur[m - 1][u - n];
                cur[m][u] = v;
            }
        }
        prev = std::move(cur);
    }
    return prev[n1];
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    check_nonempty(a, b);
    const auto sums = rank_sums(a, b);
    const double n1 = static_cast<double>(a.size());
    const double u = sums.rank_sum_a - n1 * (n1 + 1.0) / 2.0;

    if (sums.has_ties || a.size() + b.size() > kExactMaxTotal) {
        return normal_route(a.size(), b.size(), u, sums.tie_term);
    }

    const auto counts = exact_u_counts(a.size(), b.size());
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto ui = static_cast<std::size_t>(std::llround(u));
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k <= ui) lower += counts[k];
        if (k >= ui) upper += counts[k];
    }
    const double p = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return {u, clamp_p(p), a.size(), b.size(), UTestMethod::Exact};
}

UTestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b) {
    check_nonempty(a, b);
    const auto sums = rank_sums(a, b);
    const double n1 = static_cast<double>(a.size());
    return normal_route(a.size(), b.size(), sums.rank_sum_a - n1 * (n1 + 1.0) / 2.0, sums.tie_term);
}

double mann_whitney_p_greater(std::span<const double> a, std::span<const double> b) {
    check_nonempty(a, b);
    const auto sums = rank_sums(a, b);
    const double n1 = static_cast<double>(a.size());
    const double u = sums.rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const auto [mean, sd] = u_moments(n1, static_cast<double>(b.size()), sums.tie_term);
    if (sd <= 0.0) return 1.0;
    return clamp_p(normal_sf((u - mean - 0.5) / sd));
}

std::vector<std::size_t> issue_comment_runs(std::span<const EventType> events) {
    std::vector<std::size_t> runs;
    std::size_t current = 0;
    for (EventType t : events) {
        if (t == EventType::IssueComment) {
            ++current;
        } else if (current > 0) {
            runs.push_back(current);
            current = 0;
        }
    }
    if (current > 0) runs.push_back(current);
    return runs;
}

std::optional<double> run_length_mean(std::span<const EventType> events) {
    const auto runs = issue_comment_runs(events);
    if (runs.empty()) return std::nullopt;
    const double total = static_cast<double>(std::accumulate(runs.begin(), runs.end(), std::size_t{0}));
    return total / static_cast<double>(runs.size());
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::EmptySample, "median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

RunLengthComparison compare_run_lengths(const std::vector<std::vector<EventType>>& group_a,
                                        const std::vector<std::vector<EventType>>& group_b,
                                        RunLengthMode mode) {
    auto observations = [mode](const std::vector<std::vector<EventType>>& group, std::size_t& teams) {
        std::vector<double> out;
        teams = 0;
        for (const auto& seq : group) {
            if (mode == RunLengthMode::PerTeamMean) {
                if (auto m = run_length_mean(seq)) {
                    out.push_back(*m);
                    ++teams;
                }
            } else {
                const auto runs = issue_comment_runs(seq);
                if (!runs.empty()) ++teams;
                for (auto r : runs) out.push_back(static_cast<double>(r));
            }
        }
        return out;
    };

    RunLengthComparison result;
    const auto a = observations(group_a, result.teams_a);
    const auto b = observations(group_b, result.teams_b);
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptySample, "each group needs at least one team with issue comments");
    }
    result.test = mann_whitney_u(a, b);
    result.median_a = median(a);
    result.median_b = median(b);
    if (result.median_a > result.median_b) {
        result.direction = Direction::FirstHigher;
    } else if (result.median_b > result.median_a) {
        result.direction = Direction::SecondHigher;
    } else {
        result.direction = Direction::Tie;
    }
    return result;
}

std::vector<ProportionRow> proportions(std::span<const EventType> types) {
    if (types.empty()) throw Error(ErrorCode::EmptyCorpus, "no events to summarize");
    std::array<std::size_t, kEventTypeCount> counts{};
    for (EventType t : types) ++counts[static_cast<std::size_t>(t)];

    std::vector<ProportionRow> rows;
    for (EventType t : kAllEventTypes) {
        const auto c = counts[static_cast<std::size_t>(t)];
        if (c == 0) continue;
        rows.push_back({t, c, 100.0 * static_cast<double>(c) / static_cast<double>(types.size())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.count > y.count; });
    return rows;
}

std::vector<ProportionRow> proportions(const std::vector<Event>& events) {
    std::vector<EventType> types;
    types.reserve(events.size());
    for (const auto& e : events) types.push_back(e.event_type);
    return proportions(types);
}

const char* to_string(UTestMethod method) noexcept {
    return method == UTestMethod::Exact ? "exact" : "normal_approx";
}

const char* to_string(Direction direction) noexcept {
    switch (direction) {
        case Direction::FirstHigher: return "first_higher";
        case Direction::SecondHigher: return "second_higher";
        case Direction::Tie: return "tie";
    }
    return "tie";
}

}  // namespace teamflow::stats
