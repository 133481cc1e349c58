#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moped/calibrate.hpp"
#include "moped/detector.hpp"
#include "moped/error.hpp"
#include "moped/margins.hpp"
#include "moped/merge.hpp"
#include "moped/metrics.hpp"
#include "moped/simulate.hpp"
#include "moped/tpdm.hpp"

#include <optional>

namespace py = pybind11;
using namespace moped;

namespace {

MultivariateSeries as_series(const Matrix& x) {
    return MultivariateSeries(x);
}

PermutationConfig perm_config(std::size_t permutations, double alpha, std::uint64_t seed, std::size_t threads) {
    return PermutationConfig{permutations, alpha, seed, threads};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MOPED: moving-sum detection of changes in pairwise extremal dependence";

    static py::exception<Error> moped_error(m, "MopedError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(moped_error, e.what());
        }
    });

    py::class_<ChangePoint>(m, "ChangePoint")
        .def_readonly("tau", &ChangePoint::tau)
        .def_readonly("height", &ChangePoint::height)
        .def_readonly("p_value", &ChangePoint::p_value)
        .def_readonly("bandwidth", &ChangePoint::bandwidth)
        .def_readonly("rank", &ChangePoint::rank)
        .def("__repr__", [](const ChangePoint& cp) {
            return "ChangePoint(tau=" + std::to_string(cp.tau) + ", height=" + std::to_string(cp.height) + ")";
        });

    py::class_<TpdmEstimate>(m, "TpdmEstimate")
        .def_readonly("sigma", &TpdmEstimate::sigma)
        .def_readonly("k", &TpdmEstimate::k)
        .def_readonly("r0", &TpdmEstimate::r0)
        .def_property_readonly("window", [](const TpdmEstimate& e) {
            return py::make_tuple(e.window.begin, e.window.end);
        });

    py::class_<DetectorTrace>(m, "DetectorTrace")
        .def_readonly("values", &DetectorTrace::values)
        .def_property_readonly("first_time", &DetectorTrace::first_time)
        .def_property_readonly("bandwidth", [](const DetectorTrace& t) { return t.config.bandwidth; })
        .def_property_readonly("rank", [](const DetectorTrace& t) { return t.config.rank; })
        .def_property_readonly("eta", [](const DetectorTrace& t) { return t.config.eta; });

    py::class_<NullStatistics>(m, "NullStatistics")
        .def_readonly("maxima", &NullStatistics::maxima)
        .def_readonly("threshold", &NullStatistics::threshold);

    py::class_<MopedResult>(m, "MopedResult")
        .def_readonly("trace", &MopedResult::trace)
        .def_readonly("null", &MopedResult::null)
        .def_readonly("changes", &MopedResult::changes);

    m.def("rank_transform_pareto2",
          [](const Matrix& raw) { return rank_transform_pareto2(RawSeries(raw)).values(); },
          py::arg("raw"), "Column-wise empirical rank transform to Pareto(2) margins.");
    m.def("compute_radii", &compute_radii, py::arg("values"));

    m.def("estimate_tpdm",
          [](const Matrix& x, std::size_t k, std::size_t begin, std::optional<std::size_t> end) {
              const auto series = as_series(x);
              return estimate_tpdm(series, IndexRange{begin, end.value_or(series.length())}, k);
          },
          py::arg("x"), py::arg("k"), py::arg("begin") = 0, py::arg("end") = py::none());
    m.def("estimate_segment_tpdms",
          [](const Matrix& x, const std::vector<std::size_t>& changes, double quantile) {
              return estimate_segment_tpdms(as_series(x), std::span<const std::size_t>(changes), quantile);
          },
          py::arg("x"), py::arg("changes"), py::arg("quantile") = 0.95);

    m.def("detector_trace",
          [](const Matrix& x, std::size_t bandwidth, std::size_t rank, double eta) {
              return detector_trace(as_series(x), DetectorConfig{bandwidth, rank, eta});
          },
          py::arg("x"), py::arg("bandwidth"), py::arg("rank"), py::arg("eta") = 0.4);
    m.def("select_changes", &select_changes, py::arg("trace"), py::arg("threshold"));

    m.def("permutation_null",
          [](const Matrix& x, std::size_t bandwidth, std::size_t rank, double eta, std::size_t permutations,
             double alpha, std::uint64_t seed, std::size_t threads) {
              const PreparedSeries prepared(as_series(x));
              py::gil_scoped_release release;
              return permutation_null(prepared, DetectorConfig{bandwidth, rank, eta},
                                      perm_config(permutations, alpha, seed, threads));
          },
          py::arg("x"), py::arg("bandwidth"), py::arg("rank"), py::arg("eta") = 0.4, py::arg("permutations") = 200,
          py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("threads") = 1);
    m.def("p_value", &p_value, py::arg("height"), py::arg("null"));

    m.def("moped",
          [](const Matrix& x, std::size_t bandwidth, std::size_t rank, double eta, double alpha,
             std::size_t permutations, std::uint64_t seed, std::size_t threads) {
              const PreparedSeries prepared(as_series(x));
              py::gil_scoped_release release;
              return run_moped(prepared, DetectorConfig{bandwidth, rank, eta},
                               perm_config(permutations, alpha, seed, threads));
          },
          py::arg("x"), py::arg("bandwidth"), py::arg("rank"), py::arg("eta") = 0.4, py::arg("alpha") = 0.05,
          py::arg("permutations") = 200, py::arg("seed") = 0, py::arg("threads") = 1,
          "Single-scale detection: trace, permutation threshold, eta-criterion and p-values.");

    m.def("merge_over_ranks",
          [](const Matrix& x, std::size_t bandwidth, const std::vector<std::size_t>& ranks, double eta,
             double alpha, std::size_t permutations, std::uint64_t seed, std::size_t threads) {
              const PreparedSeries prepared(as_series(x));
              py::gil_scoped_release release;
              return merge_over_ranks(prepared, bandwidth, RankLadder{ranks}, eta,
                                      perm_config(permutations, alpha, seed, threads))
                  .changes;
          },
          py::arg("x"), py::arg("bandwidth"), py::arg("ranks"), py::arg("eta") = 0.4, py::arg("alpha") = 0.05,
          py::arg("permutations") = 200, py::arg("seed") = 0, py::arg("threads") = 1);
    m.def("merge_over_bandwidths",
          [](const Matrix& x, const std::vector<std::size_t>& bandwidths, const std::vector<double>& rank_fractions,
             double eta, double alpha, std::size_t permutations, std::uint64_t seed, std::size_t threads) {
              const PreparedSeries prepared(as_series(x));
              py::gil_scoped_release release;
              return merge_over_bandwidths(prepared, BandwidthLadder{bandwidths, rank_fractions}, eta,
                                           perm_config(permutations, alpha, seed, threads))
                  .changes;
          },
          py::arg("x"), py::arg("bandwidths"), py::arg("rank_fractions") = std::vector<double>{0.2, 0.1, 0.05},
          py::arg("eta") = 0.4, py::arg("alpha") = 0.05, py::arg("permutations") = 200, py::arg("seed") = 0,
          py::arg("threads") = 1);
    m.def("bottom_up_merge",
          [](const std::vector<std::vector<std::size_t>>& levels, const std::vector<double>& exclusion) {
              std::vector<ChangePointSet> sets;
              for (const auto& level : levels) {
                  ChangePointSet set;
                  for (const auto tau : level) {
                      set.push_back(ChangePoint{tau, 0.0, std::nullopt, 0, 0});
                  }
                  sets.push_back(std::move(set));
              }
              return locations(bottom_up_merge(sets, exclusion));
          },
          py::arg("levels"), py::arg("exclusion"));

    m.def("generate_scenario",
          [](int scenario, std::size_t n, std::size_t d, std::size_t q, double rho, std::uint64_t omega_seed,
             double nu, const std::string& margin, const std::vector<std::size_t>& change_points,
             std::uint64_t seed) {
              ScenarioSpec spec;
              spec.scenario = scenario;
              spec.n = n;
              spec.d = d;
              spec.q = q;
              spec.rho = rho;
              spec.omega_seed = omega_seed;
              spec.nu = nu;
              spec.margin = parse_margin(margin);
              spec.change_points = change_points;
              auto sim = generate_scenario(spec, seed);
              return py::make_tuple(sim.values, sim.change_points);
          },
          py::arg("scenario") = 1, py::arg("n") = 5000, py::arg("d") = 2, py::arg("q") = 0, py::arg("rho") = 0.6,
          py::arg("omega_seed") = 1, py::arg("nu") = 3.0, py::arg("margin") = "pareto2",
          py::arg("change_points") = std::vector<std::size_t>{}, py::arg("seed") = 0,
          "Returns (values, change_points).");
    m.def("random_correlation", &random_correlation, py::arg("d"), py::arg("seed"));

    m.def("covering_metric",
          [](std::size_t n, const std::vector<std::size_t>& truth, const std::vector<std::size_t>& estimate) {
              return covering_metric(Segmentation(n, truth), Segmentation(n, estimate));
          },
          py::arg("n"), py::arg("truth"), py::arg("estimate"));
    m.def("v_measure",
          [](std::size_t n, const std::vector<std::size_t>& truth, const std::vector<std::size_t>& estimate) {
              return v_measure(Segmentation(n, truth), Segmentation(n, estimate));
          },
          py::arg("n"), py::arg("truth"), py::arg("estimate"));
    m.def("qhat_distribution",
          [](const std::vector<long>& diffs) { return qhat_distribution(diffs).fractions; },
          py::arg("differences"), "Fractions for qhat - q in (<=-2, -1, 0, 1, >=2).");
}
