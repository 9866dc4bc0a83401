#include "teamflow/motif.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <thread>

#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/stats.hpp"

namespace teamflow::motif {

namespace {

std::string window_key(std::span<const Symbol> w) {
    std::string key(w.size(), '\0');
    for (std::size_t i = 0; i < w.size(); ++i) key[i] = static_cast<char>(w[i]);
    return key;
}

Window key_window(const std::string& key) {
    Window w(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) w[i] = static_cast<Symbol>(key[i]);
    return w;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void validate(const std::vector<SequenceGroup>& groups, std::size_t w) {
    if (groups.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two sequence groups");
    if (w < 2) throw Error(ErrorCode::InvalidArgument, "window length must be at least 2");
    for (const auto& g : groups) {
        if (g.sequences.empty()) throw Error(ErrorCode::InvalidArgument, "group '" + g.name + "' is empty");
        for (const auto& s : g.sequences) {
            if (s.size() < w) {
                throw Error(ErrorCode::SequenceTooShort, "group '" + g.name + "' has a sequence of length " +
                                                             std::to_string(s.size()) + " < w=" + std::to_string(w));
            }
        }
    }
}

}  // namespace

std::vector<Window> candidates(std::span<const std::vector<Symbol>> group, std::size_t w, std::size_t k) {
    if (w == 0) throw Error(ErrorCode::InvalidArgument, "window length must be positive");
    std::map<std::string, std::size_t> df;
    bool any = false;
    std::set<std::string> seen;
    for (const auto& s : group) {
        if (s.size() < w) continue;
        any = true;
        seen.clear();
        for (std::size_t off = 0; off + w <= s.size(); ++off) {
            seen.insert(window_key(std::span(s).subspan(off, w)));
        }
        for (const auto& key : seen) ++df[key];
    }
    if (!any) throw Error(ErrorCode::WindowTooLong, "w=" + std::to_string(w) + " exceeds every sequence length");

    std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());  // lexicographic already
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (k != kAllWindows && ranked.size() > k) ranked.resize(k);

    std::vector<Window> out;
    out.reserve(ranked.size());
    for (const auto& [key, _] : ranked) out.push_back(key_window(key));
    return out;
}

std::size_t document_frequency(std::span<const std::vector<Symbol>> group, std::span<const Symbol> window) {
    std::size_t n = 0;
    for (const auto& s : group) {
        if (s.size() >= window.size() && motif_distance(window, s) == 0.0) ++n;
    }
    return n;
}

double motif_distance(std::span<const Symbol> m, std::span<const Symbol> s) {
    const std::size_t w = m.size();
    if (w == 0) throw Error(ErrorCode::InvalidArgument, "empty motif");
    if (s.size() < w) {
        throw Error(ErrorCode::SequenceTooShort,
                    "sequence length " + std::to_string(s.size()) + " < motif length " + std::to_string(w));
    }
    std::size_t best = w;
    for (std::size_t off = 0; off + w <= s.size() && best > 0; ++off) {
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < w && mismatches < best; ++i) mismatches += m[i] != s[off + i];
        best = std::min(best, mismatches);
    }
    return static_cast<double>(best) / static_cast<double>(w);
}

std::vector<CandidateStats> score_candidates(const std::vector<SequenceGroup>& groups, const DiscoverOptions& options) {
    validate(groups, options.w);

    std::vector<CandidateStats> all;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto& m : candidates(groups[g].sequences, options.w, options.k)) {
            CandidateStats c;
            c.symbols = std::move(m);
            c.group = g;
            all.push_back(std::move(c));
        }
    }

    parallel_for(all.size(), options.threads, [&](std::size_t i) {
        auto& c = all[i];
        std::vector<std::vector<double>> dist(groups.size());
        for (std::size_t h = 0; h < groups.size(); ++h) {
            dist[h].reserve(groups[h].sequences.size());
            for (const auto& s : groups[h].sequences) dist[h].push_back(motif_distance(c.symbols, s));
        }
        c.mean_own = mean(dist[c.group]);
        c.support = static_cast<std::size_t>(std::count(dist[c.group].begin(), dist[c.group].end(), 0.0));
        c.mean_other.assign(groups.size(), 0.0);
        c.p_raw.assign(groups.size(), 1.0);
        for (std::size_t h = 0; h < groups.size(); ++h) {
            if (h == c.group) continue;
            c.mean_other[h] = mean(dist[h]);
            c.p_raw[h] = stats::mann_whitney_u(dist[c.group], dist[h]).p_two_sided;
        }
    });
    return all;
}

ContrastMotifSet discover(const std::vector<SequenceGroup>& groups, const DiscoverOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1]");
    const auto scored = score_candidates(groups, options);

    ContrastMotifSet result;
    result.w = options.w;
    result.candidate_count = scored.size();
    for (const auto& g : groups) result.groups.push_back({g.name, 0, {}});

    const double total = static_cast<double>(scored.size());
    for (const auto& c : scored) {
        auto& out = result.groups[c.group];
        ++out.candidates;
        bool accepted = true;
        double worst_p = 0.0;
        double closest_other = 1.0;
        for (std::size_t h = 0; h < groups.size(); ++h) {
            if (h == c.group) continue;
            const double p = std::min(1.0, c.p_raw[h] * total);
            worst_p = std::max(worst_p, p);
            closest_other = std::min(closest_other, c.mean_other[h]);
            if (!(c.mean_own < c.mean_other[h]) || !(p < options.alpha)) accepted = false;
        }
        if (!accepted) continue;
        out.motifs.push_back({c.symbols, groups[c.group].name, c.mean_own, closest_other, worst_p, c.support});
    }
    for (auto& g : result.groups) {
        std::stable_sort(g.motifs.begin(), g.motifs.end(), [](const Motif& a, const Motif& b) {
            return a.mean_dist_own < b.mean_dist_own || (a.mean_dist_own == b.mean_dist_own && a.symbols < b.symbols);
        });
    }
    return result;
}

std::vector<SweepEntry> window_sweep(const std::vector<SequenceGroup>& groups, std::size_t w_min, std::size_t w_max,
                                     const DiscoverOptions& base) {
    if (w_min < 2 || w_max < w_min) throw Error(ErrorCode::InvalidArgument, "invalid window range");
    std::vector<SweepEntry> out;
    for (std::size_t w = w_min; w <= w_max; ++w) {
        SweepEntry entry;
        entry.w = w;
        std::vector<SequenceGroup> trimmed;
        bool empty_group = false;
        for (const auto& g : groups) {
            SequenceGroup t{g.name, {}};
            for (const auto& s : g.sequences) {
                if (s.size() >= w) t.sequences.push_back(s);
            }
            entry.excluded[g.name] = g.sequences.size() - t.sequences.size();
            empty_group = empty_group || t.sequences.empty();
            trimmed.push_back(std::move(t));
        }
        if (empty_group) {
            entry.error = std::string(error_code_name(ErrorCode::WindowTooLong)) + ": w=" + std::to_string(w) +
                          " exceeds every sequence of some group";
            out.push_back(std::move(entry));
            continue;
        }
        DiscoverOptions opt = base;
        opt.w = w;
        try {
            entry.result = discover(trimmed, opt);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

MotifGraph motif_graph(std::span<const Motif> motifs, std::string group) {
    MotifGraph g;
    g.group = std::move(group);
    for (const auto& m : motifs) {
        for (std::size_t i = 0; i < m.symbols.size(); ++i) {
            g.nodes.insert(m.symbols[i]);
            if (i + 1 < m.symbols.size()) ++g.edges[{m.symbols[i], m.symbols[i + 1]}];
        }
    }
    return g;
}

std::string render_dot(const MotifGraph& graph) {
    std::ostringstream out;
    out << "digraph \"" << graph.group << "\" {\n";
    for (Symbol s : graph.nodes) out << "  \"" << to_string(s) << "\";\n";
    for (const auto& [edge, weight] : graph.edges) {
        out << "  \"" << to_string(edge.first) << "\" -> \"" << to_string(edge.second) << "\" [label=" << weight
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string render_motifs_csv(const std::vector<ContrastMotifSet>& sets) {
    io::CsvTable t;
    t.header = {"group", "w", "symbols", "mean_own", "mean_other", "p_corrected", "support"};
    for (const auto& set : sets) {
        for (const auto& g : set.groups) {
            for (const auto& m : g.motifs) {
                t.rows.push_back({g.group, std::to_string(set.w), encode_symbols(m.symbols),
                                  io::format_double(m.mean_dist_own), io::format_double(m.mean_dist_other),
                                  io::format_double(m.p_value), std::to_string(m.support)});
            }
        }
    }
    return io::render_csv(t);
}

std::vector<MotifRow> read_motifs_csv(const std::string& path) {
    const auto t = io::read_csv(path);
    const auto c_group = t.column("group"), c_w = t.column("w"), c_sym = t.column("symbols"),
               c_own = t.column("mean_own"), c_other = t.column("mean_other"), c_p = t.column("p_corrected"),
               c_support = t.column("support");
    std::vector<MotifRow> out;
    for (const auto& row : t.rows) {
        out.push_back({row[c_group], static_cast<std::size_t>(io::parse_int(row[c_w], "w")), decode_symbols(row[c_sym]),
                       io::parse_double(row[c_own], "mean_own"), io::parse_double(row[c_other], "mean_other"),
                       io::parse_double(row[c_p], "p_corrected"),
                       static_cast<std::size_t>(io::parse_int(row[c_support], "support"))});
    }
    return out;
}

}  // namespace teamflow::motif
