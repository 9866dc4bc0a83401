#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/motif.hpp"

using namespace teamflow;
using namespace teamflow::motif;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<Symbol>> decode_all(const std::vector<std::string>& codes) {
    std::vector<std::vector<Symbol>> out;
    for (const auto& c : codes) out.push_back(decode_symbols(c));
    return out;
}

std::vector<SequenceGroup> to_groups(const oracle::Groups& g) {
    std::vector<SequenceGroup> out;
    for (const auto& [name, seqs] : g) out.push_back({name, decode_all(seqs)});
    return out;
}

std::vector<oracle::Accepted> accepted(const ContrastMotifSet& set) {
    std::vector<oracle::Accepted> out;
    for (const auto& g : set.groups) {
        for (const auto& m : g.motifs) out.push_back({g.group, encode_symbols(m.symbols), m.mean_dist_own, m.p_value});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string random_code(std::mt19937& rng, std::size_t n, const std::string& alphabet) {
    std::string s(n, ' ');
    for (auto& c : s) c = alphabet[rng() % alphabet.size()];
    return s;
}

// Planted corpus: group "a" carries `motif` in most sequences.
oracle::Groups planted(unsigned seed, std::size_t n, const std::string& motif) {
    std::mt19937 rng(seed);
    oracle::Groups g = {{"a", {}}, {"b", {}}};
    for (std::size_t i = 0; i < n; ++i) {
        auto s = random_code(rng, 8 + rng() % 5, "PRICDV");
        if (rng() % 10 < 8) s.replace(rng() % (s.size() - motif.size() + 1), motif.size(), motif);
        g[0].second.push_back(s);
        g[1].second.push_back(random_code(rng, 8 + rng() % 5, "PRICDV"));
    }
    return g;
}

std::vector<fs::path> micro_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(fs::path(TEAMFLOW_SOURCE_DIR) / "tests/data/micro")) {
        if (e.path().extension() == ".csv") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("candidates: document frequency order, lexicographic ties") {
    const auto group = decode_all({"PRPR", "RPRP", "PPPP"});
    const auto c = candidates(group, 2, kAllWindows);
    REQUIRE(c.size() == 3);
    // PR and RP both in 2 sequences, PP in 1; PU < PR in symbol order
    CHECK(encode_symbols(c[0]) == "PR");
    CHECK(encode_symbols(c[1]) == "RP");
    CHECK(encode_symbols(c[2]) == "PP");
    CHECK(candidates(group, 2, 1).size() == 1);
    CHECK(document_frequency(group, decode_symbols("PR")) == 2);

    // shorter sequences contribute nothing
    CHECK(candidates(decode_all({"PR", "PRIC"}), 3, kAllWindows).size() == 2);
    CHECK_THROWS_AS(candidates(decode_all({"PR", "PRI"}), 4, kAllWindows), Error);
}

TEST_CASE("motif_distance") {
    CHECK(motif_distance(decode_symbols("PRI"), decode_symbols("CCPRICC")) == 0.0);
    CHECK(motif_distance(decode_symbols("PRI"), decode_symbols("PRCPCI")) == doctest::Approx(1.0 / 3.0));
    CHECK(motif_distance(decode_symbols("PRI"), decode_symbols("DDD")) == 1.0);
    CHECK_THROWS_AS(motif_distance(decode_symbols("PRIC"), decode_symbols("PRI")), Error);

    std::mt19937 rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const auto m = random_code(rng, 2 + rng() % 4, "PRICDV");
        const auto s = random_code(rng, m.size() + rng() % 8, "PRICDV");
        const double d = motif_distance(decode_symbols(m), decode_symbols(s));
        CHECK(d == doctest::Approx(oracle::min_hamming(m, s)));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("discover: invalid arguments") {
    const std::vector<SequenceGroup> two = {{"a", decode_all({"PRIC"})}, {"b", decode_all({"DDDD"})}};
    DiscoverOptions opt;
    opt.w = 5;
    CHECK_THROWS_AS(discover(two, opt), Error);
    opt.w = 1;
    CHECK_THROWS_AS(discover(two, opt), Error);
    opt.w = 2;
    opt.alpha = 0.0;
    CHECK_THROWS_AS(discover(two, opt), Error);
    opt.alpha = 0.01;
    CHECK_THROWS_AS(discover({two[0]}, opt), Error);
}

TEST_CASE("planted motif is found for its own group only") {
    const auto g = planted(1, 60, "RIPI");
    DiscoverOptions opt;
    opt.w = 4;
    const auto set = discover(to_groups(g), opt);
    REQUIRE(set.groups.size() == 2);
    CHECK(set.candidate_count == set.groups[0].candidates + set.groups[1].candidates);
    const auto& a = set.groups[0].motifs;
    REQUIRE_FALSE(a.empty());
    CHECK(std::any_of(a.begin(), a.end(), [](const Motif& m) { return encode_symbols(m.symbols) == "RIPI"; }));
    for (const auto& m : a) {
        CHECK(m.mean_dist_own < m.mean_dist_other);
        CHECK(m.p_value < opt.alpha);
    }
    CHECK(std::is_sorted(a.begin(), a.end(), [](const Motif& x, const Motif& y) { return x.mean_dist_own < y.mean_dist_own; }));
    for (const auto& m : set.groups[1].motifs) CHECK(encode_symbols(m.symbols) != "RIPI");

    // threads do not change the result
    opt.threads = 4;
    CHECK(accepted(discover(to_groups(g), opt)).size() == accepted(set).size());
}

TEST_CASE("identical groups accept nothing") {
    std::mt19937 rng(6);
    std::vector<std::string> seqs;
    for (int i = 0; i < 30; ++i) seqs.push_back(random_code(rng, 6 + rng() % 6, "PRICDV"));
    DiscoverOptions opt;
    opt.k = kAllWindows;
    for (std::size_t w = 2; w <= 5; ++w) {
        opt.w = w;
        CHECK(accepted(discover(to_groups({{"a", seqs}, {"b", seqs}}), opt)).empty());
    }
}

TEST_CASE("swapping group order gives the same accepted sets") {
    const auto g = planted(2, 40, "PRPI");
    const oracle::Groups swapped = {g[1], g[0]};
    DiscoverOptions opt;
    opt.w = 4;
    const auto x = accepted(discover(to_groups(g), opt));
    const auto y = accepted(discover(to_groups(swapped), opt));
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].group == y[i].group);
        CHECK(x[i].symbols == y[i].symbols);
        CHECK(x[i].p_corrected == doctest::Approx(y[i].p_corrected));
    }
}

TEST_CASE("relabeling the alphabet relabels the accepted motifs") {
    const auto g = planted(3, 40, "RIPI");
    const std::string from = "PRICDV", to = "DVCPRI";
    auto relabel = [&](std::string s) {
        for (auto& c : s) c = to[from.find(c)];
        return s;
    };
    oracle::Groups h = g;
    for (auto& [_, seqs] : h) {
        for (auto& s : seqs) s = relabel(s);
    }
    DiscoverOptions opt;
    opt.w = 3;
    opt.k = kAllWindows;  // top-k tie breaking depends on symbol order
    auto x = accepted(discover(to_groups(g), opt));
    const auto y = accepted(discover(to_groups(h), opt));
    for (auto& a : x) a.symbols = relabel(a.symbols);
    std::sort(x.begin(), x.end());
    REQUIRE(x.size() == y.size());
    CHECK_FALSE(x.empty());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].symbols == y[i].symbols);
        CHECK(x[i].mean_own == doctest::Approx(y[i].mean_own));
    }
}

TEST_CASE("micro-corpora: exhaustive discover equals brute-force enumeration") {
    const auto files = micro_files();
    REQUIRE(files.size() >= 6);
    std::size_t nonempty = 0;
    for (const auto& file : files) {
        const auto corpus = oracle::read_micro(file);
        std::size_t longest = 0, count = 0;
        for (const auto& [_, seqs] : corpus) {
            count += seqs.size();
            for (const auto& s : seqs) longest = std::max(longest, s.size());
        }
        CHECK(count <= 20);
        CHECK(longest <= 12);

        DiscoverOptions opt;
        opt.k = kAllWindows;
        const auto sweep = window_sweep(to_groups(corpus), 2, 5, opt);
        REQUIRE(sweep.size() == 4);
        for (const auto& entry : sweep) {
            const std::string name = file.filename().string() + " w=" + std::to_string(entry.w);
            CAPTURE(name);
            oracle::Groups trimmed;
            for (const auto& [g, seqs] : corpus) {
                std::vector<std::string> kept;
                for (const auto& s : seqs) {
                    if (s.size() >= entry.w) kept.push_back(s);
                }
                trimmed.push_back({g, kept});
            }
            REQUIRE(entry.result.has_value());
            const auto got = accepted(*entry.result);
            const auto want = oracle::discover(trimmed, entry.w, opt.alpha);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].group == want[i].group);
                CHECK(got[i].symbols == want[i].symbols);
                CHECK(got[i].mean_own == doctest::Approx(want[i].mean_own));
                CHECK(got[i].p_corrected == doctest::Approx(want[i].p_corrected));
            }
            nonempty += !got.empty();
        }
    }
    // the planted corpora make the comparison non-trivial
    CHECK(nonempty >= 3);
}

TEST_CASE("window_sweep: per-w exclusion and failure entries") {
    const std::vector<SequenceGroup> groups = {{"a", decode_all({"PRIPRI", "PRI", "PRIPRIPR"})},
                                               {"b", decode_all({"DDDDDD", "CCCC", "DDCC"})}};
    DiscoverOptions opt;
    opt.k = kAllWindows;
    const auto sweep = window_sweep(groups, 2, 7, opt);
    REQUIRE(sweep.size() == 6);
    CHECK(sweep[0].excluded.at("a") == 0);
    CHECK(sweep[2].excluded.at("a") == 1);  // w=4 drops PRI
    CHECK(sweep[2].excluded.at("b") == 0);
    CHECK(sweep[3].excluded.at("b") == 2);
    CHECK(sweep[4].result.has_value());
    CHECK(sweep[4].excluded.at("b") == 2);
    CHECK_FALSE(sweep[5].result.has_value());  // no sequence of b reaches 7
    CHECK(sweep[5].error.find("WindowTooLong") != std::string::npos);
    CHECK_THROWS_AS(window_sweep(groups, 5, 4, opt), Error);
}

TEST_CASE("motif graph and DOT") {
    std::vector<Motif> motifs = {{decode_symbols("PRIP"), "a", 0, 1, 0, 0}, {decode_symbols("RIC"), "a", 0, 1, 0, 0}};
    const auto g = motif_graph(motifs, "a");
    std::size_t total = 0;
    for (const auto& [_, w] : g.edges) total += w;
    CHECK(total == 3 + 2);  // sum of (w - 1)
    CHECK(g.edges.at({Symbol::PR, Symbol::IS}) == 2);
    CHECK(g.nodes.size() == 4);

    const auto dot = render_dot(g);
    CHECK(dot.rfind("digraph \"a\" {\n", 0) == 0);
    CHECK(dot.find("[label=2]") != std::string::npos);
    CHECK(dot.back() == '\n');
    CHECK(render_dot(motif_graph({}, "empty")) == "digraph \"empty\" {\n}\n");
}

TEST_CASE("motifs CSV round trip") {
    const auto g = planted(4, 50, "RIPI");
    DiscoverOptions opt;
    opt.w = 4;
    const auto set = discover(to_groups(g), opt);
    const auto dir = fs::temp_directory_path() / "teamflow_test_motif";
    fs::create_directories(dir);
    io::write_text(dir / "motifs.csv", render_motifs_csv({set}));
    const auto rows = read_motifs_csv((dir / "motifs.csv").string());
    std::size_t n = 0;
    for (const auto& grp : set.groups) {
        for (const auto& m : grp.motifs) {
            REQUIRE(n < rows.size());
            CHECK(rows[n].group == grp.group);
            CHECK(rows[n].w == 4);
            CHECK(rows[n].symbols == m.symbols);
            CHECK(rows[n].p_corrected == doctest::Approx(m.p_value));
            CHECK(rows[n].support == m.support);
            ++n;
        }
    }
    CHECK(n == rows.size());
}
