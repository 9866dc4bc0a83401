#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teamflow/bot_detect.hpp"
#include "teamflow/error.hpp"
#include "teamflow/event_model.hpp"
#include "teamflow/motif.hpp"
#include "teamflow/pipeline.hpp"
#include "teamflow/stats.hpp"
#include "teamflow/team_seq.hpp"

namespace py = pybind11;
using namespace teamflow;

namespace {

py::dict u_test(const std::vector<double>& a, const std::vector<double>& b, bool force_normal) {
    const auto r = force_normal ? stats::mann_whitney_u_normal(a, b) : stats::mann_whitney_u(a, b);
    py::dict d;
    d["u"] = r.u_statistic;
    d["p"] = r.p_two_sided;
    d["n1"] = r.n1;
    d["n2"] = r.n2;
    d["method"] = stats::to_string(r.method);
    return d;
}

py::list discover(const std::map<std::string, std::vector<std::string>>& groups, std::size_t w, std::size_t k,
                  double alpha) {
    std::vector<motif::SequenceGroup> gs;
    for (const auto& [name, codes] : groups) {
        motif::SequenceGroup g{name, {}};
        for (const auto& c : codes) g.sequences.push_back(decode_symbols(c));
        gs.push_back(std::move(g));
    }
    motif::DiscoverOptions opt;
    opt.w = w;
    opt.k = k;
    opt.alpha = alpha;
    py::list out;
    {
        py::gil_scoped_release release;
        const auto set = motif::discover(gs, opt);
        py::gil_scoped_acquire acquire;
        for (const auto& g : set.groups) {
            for (const auto& m : g.motifs) {
                py::dict d;
                d["group"] = g.group;
                d["symbols"] = encode_symbols(m.symbols);
                d["mean_own"] = m.mean_dist_own;
                d["mean_other"] = m.mean_dist_other;
                d["p_corrected"] = m.p_value;
                d["support"] = m.support;
                out.append(d);
            }
        }
    }
    return out;
}

std::vector<std::tuple<std::string, std::size_t, double>> proportions(const std::string& path) {
    std::vector<std::tuple<std::string, std::size_t, double>> out;
    for (const auto& r : stats::proportions(read_events(path))) out.emplace_back(to_string(r.type), r.count, r.percent);
    return out;
}

std::string run_pipeline(const std::string& config_path, const std::string& output_dir) {
    auto config = pipeline::load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    py::gil_scoped_release release;
    return pipeline::run(config).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "teamflow native core";
    m.attr("__version__") = pipeline::kVersion;

    // messages start with the error code name, e.g. "WindowTooLong: ..."
    py::register_exception<Error>(m, "TeamflowError", PyExc_RuntimeError);

    m.def("mann_whitney_u", &u_test, py::arg("a"), py::arg("b"), py::arg("force_normal") = false);
    m.def("f1_from", &bots::f1_from, py::arg("precision"), py::arg("recall"));
    m.def(
        "motif_distance",
        [](const std::string& motif, const std::string& seq) {
            return motif::motif_distance(decode_symbols(motif), decode_symbols(seq));
        },
        py::arg("motif"), py::arg("sequence"));
    m.def("discover", &discover, py::arg("groups"), py::arg("w") = 4, py::arg("k") = motif::kDefaultCandidates,
          py::arg("alpha") = motif::kDefaultAlpha);
    m.def("proportions", &proportions, py::arg("path"));
    m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("output_dir") = "");
    m.def("contains_bot", [](const std::string& login) { return bots::contains_bot(login); }, py::arg("login"));
}
