// Python bindings for the wwwstory core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>

#include "wwwstory/analysis.hpp"
#include "wwwstory/errors.hpp"
#include "wwwstory/index.hpp"
#include "wwwstory/measures.hpp"
#include "wwwstory/providers.hpp"
#include "wwwstory/quantum.hpp"
#include "wwwstory/report.hpp"

namespace py = pybind11;
using namespace wwwstory;

namespace {

template <class J>
py::object to_python(const J& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict oe_prediction(const quantum::OEPrediction& p) {
  py::dict d;
  d["p_a"] = p.p_a;
  d["p_b"] = p.p_b;
  d["p_a_then_b"] = p.p_a_then_b;
  d["p_b_then_a"] = p.p_b_then_a;
  d["p_aprime_then_b"] = p.p_aprime_then_b;
  d["p_a_then_bprime"] = p.p_a_then_bprime;
  d["int_b"] = p.int_b;
  d["identity_residual"] = p.identity_residual;
  return d;
}

py::dict ee_prediction(const quantum::EEPrediction& p) {
  py::dict d;
  d["p_a"] = p.p_a;
  d["p_b"] = p.p_b;
  d["p_a_and_b"] = p.p_a_and_b;
  d["interference"] = p.interference;
  d["fallacy_wrt_a"] = p.fallacy_wrt_a;
  d["fallacy_wrt_b"] = p.fallacy_wrt_b;
  return d;
}

std::unique_ptr<CountProvider> local_from_corpus(const std::vector<std::pair<std::string, std::string>>& docs,
                                                 bool case_folding) {
  std::vector<Document> corpus;
  for (const auto& [id, text] : docs) corpus.push_back({id, text, {}});
  TokenizerConfig cfg;
  cfg.case_folding = case_folding;
  return std::make_unique<LocalProvider>(std::make_shared<const Index>(Index::build(corpus, cfg)), "python");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inverted-index counts, meaning bonds, overextension analysis and quantum conjunction models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<MissingObservationError>(m, "MissingObservationError", base.ptr());
  py::register_exception<MeasureError>(m, "MeasureError", base.ptr());
  py::register_exception<FitFailure>(m, "FitFailure", base.ptr());

  m.def("tokenize", [](const std::string& text, bool case_folding) {
    TokenizerConfig cfg;
    cfg.case_folding = case_folding;
    return tokenize(text, cfg);
  }, py::arg("text"), py::arg("case_folding") = true);

  m.def("canonical_query", [](const std::string& text) { return parse_query(text).canonical(); },
        "Parse a query and return its canonical form.");

  py::class_<Index, std::shared_ptr<Index>>(m, "Index")
      .def_static("from_documents",
                  [](const std::vector<std::pair<std::string, std::string>>& docs, bool case_folding) {
                    std::vector<Document> corpus;
                    for (const auto& [id, text] : docs) corpus.push_back({id, text, {}});
                    TokenizerConfig cfg;
                    cfg.case_folding = case_folding;
                    return std::make_shared<Index>(Index::build(corpus, cfg));
                  },
                  py::arg("documents"), py::arg("case_folding") = true)
      .def_static("from_corpus_file",
                  [](const std::filesystem::path& p) { return std::make_shared<Index>(Index::build(read_corpus(p))); })
      .def_static("load", [](const std::filesystem::path& p) { return std::make_shared<Index>(Index::load(p)); })
      .def("save", &Index::save)
      .def_property_readonly("doc_count", &Index::doc_count)
      .def_property_readonly("term_count", &Index::term_count)
      .def("count", [](const Index& idx, const std::string& q) { return idx.count(parse_query(q)); })
      .def("matching_docs", [](const Index& idx, const std::string& q) { return idx.matching_docs(parse_query(q)); });

  py::class_<CountProvider>(m, "CountProvider")
      .def("count", [](const CountProvider& p, const std::string& q) { return p.get_count(parse_query(q)).count; })
      .def_property_readonly("total_documents", &CountProvider::total_documents)
      .def_property_readonly("source", [](const CountProvider& p) { return to_string(p.source()); })
      .def_property_readonly("name", &CountProvider::name)
      .def("triad_counts",
           [](const CountProvider& p, const std::string& a, const std::string& b, const std::string& c,
              const std::vector<std::string>& phrase) {
             auto k = get_triad_counts(p, a, b, c, phrase);
             py::dict d;
             d["n_W"] = k.n_W;
             d["n_A"] = k.n_A;
             d["n_B"] = k.n_B;
             d["n_C"] = k.n_C;
             d["n_AB"] = k.n_AB;
             d["n_A_B"] = k.n_A_B;
             d["n_A_C"] = k.n_A_C;
             d["n_B_C"] = k.n_B_C;
             d["n_AB_C"] = k.n_AB_C;
             d["n_A_B_C"] = k.n_A_B_C;
             d["n_A_notB"] = k.n_A_notB;
             return d;
           })
      .def("analyze_triad",
           [](const CountProvider& p, const std::string& a, const std::string& b, const std::string& c,
              const std::vector<std::string>& phrase, std::optional<double> margin, double dominance_threshold) {
             AnalysisOptions opts;
             opts.overextension_margin = margin;
             opts.dominance_threshold = dominance_threshold;
             return to_python(triad_report_json(analyze_triad(p, a, b, c, phrase, opts)));
           },
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("phrase"), py::arg("margin") = py::none(),
           py::arg("dominance_threshold") = 10.0, "Full triad report as a dict (same schema as the CLI's JSON).")
      .def("triad_markdown",
           [](const CountProvider& p, const std::string& a, const std::string& b, const std::string& c,
              const std::vector<std::string>& phrase, bool full_precision) {
             return triad_report_markdown(analyze_triad(p, a, b, c, phrase), full_precision);
           },
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("phrase"), py::arg("full_precision") = false);

  m.def("local_provider",
        [](const std::shared_ptr<Index>& idx) -> std::unique_ptr<CountProvider> {
          return std::make_unique<LocalProvider>(std::shared_ptr<const Index>(idx), "python");
        });
  m.def("local_provider_from_documents", &local_from_corpus, py::arg("documents"), py::arg("case_folding") = true);
  m.def("recorded_provider", [](const std::filesystem::path& p) -> std::unique_ptr<CountProvider> {
    return std::make_unique<RecordedProvider>(RecordedProvider::load(p));
  });

  m.def("landing_probability", [](double n_x, double n_w) { return landing_probability(n_x, n_w).value; });
  m.def("conditional_probability", [](double n_xy, double n_y) { return conditional_probability(n_xy, n_y).value; });
  m.def("meaning_bond",
        [](double n_ab, double n_a, double n_b, std::optional<double> n_w, double band) {
          auto b = meaning_bond(n_ab, n_a, n_b, n_w, band);
          return py::make_tuple(b.value, to_string(b.classification));
        },
        py::arg("n_ab"), py::arg("n_a"), py::arg("n_b"), py::arg("n_w"), py::arg("neutral_band") = kExactNeutralBand);

  m.def("ee_feasible_interference_bound", &quantum::ee_feasible_interference_bound);
  m.def("ee_fallacy_classification", [](double p_a, double p_b, double t) {
    auto c = quantum::ee_fallacy_classification(p_a, p_b, t);
    return py::make_tuple(to_string(c.classification), c.margin_a, c.margin_b);
  });

  m.def("ee_fit",
        [](double p_a, double p_b, double p_ab, long dim, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          auto fit = quantum::ee_fit(p_a, p_b, p_ab, dim, rng);
          py::dict d;
          d["feasible"] = fit.status == quantum::FitStatus::feasible;
          d["required_interference"] = fit.required_interference;
          d["bound"] = fit.bound;
          if (fit.model) {
            d["residual"] = fit.residual;
            d["prediction"] = ee_prediction(fit.prediction);
            d["model"] = to_python(quantum::to_json(*fit.model));
          } else {
            d["verdict"] = fit.verdict;
          }
          return d;
        },
        py::arg("p_a"), py::arg("p_b"), py::arg("p_a_and_b"), py::arg("dim") = 3, py::arg("seed") = 20161119);

  m.def("oe_fit",
        [](double p_a, double p_b, double p_ab, long dim, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          auto fit = quantum::oe_fit(p_a, p_b, p_ab, dim, rng);
          py::dict d;
          d["feasible"] = fit.status == quantum::FitStatus::feasible;
          if (fit.model) {
            d["residual"] = fit.residual;
            d["dim"] = fit.dim;
            d["prediction"] = oe_prediction(fit.prediction);
            d["model"] = to_python(quantum::to_json(*fit.model));
          } else {
            d["verdict"] = fit.verdict;
          }
          return d;
        },
        py::arg("p_a"), py::arg("p_b"), py::arg("p_a_then_b"), py::arg("dim") = 2, py::arg("seed") = 20161119);

  m.def("oe_forward", [](const py::object& model) {
    auto j = nlohmann::json::parse(py::module_::import("json").attr("dumps")(model).cast<std::string>());
    return oe_prediction(quantum::oe_forward(quantum::oe_model_from_json(j)));
  });
  m.def("ee_forward", [](const py::object& model) {
    auto j = nlohmann::json::parse(py::module_::import("json").attr("dumps")(model).cast<std::string>());
    return ee_prediction(quantum::ee_forward(quantum::ee_model_from_json(j)));
  });

  m.def("oe_demo",
        [](int samples, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          double max_gap = -1, max_residual = 0;
          for (int i = 0; i < samples; ++i) {
            auto p = quantum::oe_forward(quantum::random_oe_model(rng, 2, 6));
            max_gap = std::max(max_gap, p.p_a_then_b - p.p_a);
            max_residual = std::max(max_residual, p.identity_residual);
          }
          return py::make_tuple(max_gap, max_residual);
        },
        py::arg("samples") = 1000, py::arg("seed") = 20161119,
        "Max p(A then B) - p(A) and max identity residual over random sequential models.");
}
