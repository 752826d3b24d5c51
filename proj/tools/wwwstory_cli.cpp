// wwwstory: build corpus indexes, query co-occurrence counts, run triad
// overextension analyses and fit the quantum conjunction models.
//
// Exit status: 0 success, 1 internal error, 2 usage or I/O error,
// 3 data that cannot support the requested computation.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>

#include "wwwstory/analysis.hpp"
#include "wwwstory/errors.hpp"
#include "wwwstory/index.hpp"
#include "wwwstory/measures.hpp"
#include "wwwstory/providers.hpp"
#include "wwwstory/quantum.hpp"
#include "wwwstory/report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wwwstory;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::io:
      return kExitUsage;
    case ErrorKind::data:
      return kExitData;
    case ErrorKind::internal:
      return kExitInternal;
  }
  return kExitInternal;
}

struct ProviderArgs {
  std::string index_path;
  std::string cache_path;
  std::vector<std::string> exclude;
};

void add_provider_options(CLI::App* cmd, ProviderArgs& args) {
  auto* idx = cmd->add_option("--index", args.index_path, "Local index file built by `wwwstory index`");
  auto* cache = cmd->add_option("--cache", args.cache_path,
                                "Recorded count cache (path, or fixture name looked up in $WWWSTORY_FIXTURES)");
  idx->excludes(cache);
  cmd->add_option("--exclude", args.exclude, "Override the cache's exclusion terms")->needs(cache);
}

fs::path resolve_cache(const std::string& spec) {
  std::vector<fs::path> candidates{spec, spec + ".jsonl"};
  if (const char* dir = std::getenv("WWWSTORY_FIXTURES")) {
    candidates.push_back(fs::path(dir) / spec);
    candidates.push_back(fs::path(dir) / (spec + ".jsonl"));
  }
  for (const auto& c : candidates) {
    if (fs::is_regular_file(c)) return c;
  }
  throw IoError("count cache not found: " + spec);
}

std::unique_ptr<CountProvider> open_provider(const ProviderArgs& args) {
  if (args.index_path.empty() == args.cache_path.empty()) {
    throw UsageError("select exactly one count provider: --index or --cache");
  }
  if (!args.index_path.empty()) {
    auto index = std::make_shared<const Index>(Index::load(args.index_path));
    return std::make_unique<LocalProvider>(std::move(index), fs::path(args.index_path).filename().string());
  }
  auto provider = std::make_unique<RecordedProvider>(RecordedProvider::load(resolve_cache(args.cache_path)));
  if (!args.exclude.empty()) provider->set_exclusions({args.exclude.begin(), args.exclude.end()});
  return provider;
}

std::vector<std::string> split_phrase(const std::string& phrase, const TokenizerConfig& config) {
  auto terms = tokenize(phrase, config);
  if (terms.size() < 2) throw UsageError("--phrase must contain at least two terms");
  return terms;
}

void require_positive(double v, const char* name) {
  if (!(v > 0)) throw UsageError(std::string(name) + " must be positive");
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(name) + " must be a probability in [0,1]");
}

ordered_json prediction_json(const quantum::OEPrediction& p) {
  return {{"p_a", p.p_a},
          {"p_b", p.p_b},
          {"p_a_then_b", p.p_a_then_b},
          {"p_b_then_a", p.p_b_then_a},
          {"p_aprime_then_b", p.p_aprime_then_b},
          {"p_a_then_bprime", p.p_a_then_bprime},
          {"int_b", p.int_b},
          {"identity_residual", p.identity_residual}};
}

ordered_json prediction_json(const quantum::EEPrediction& p) {
  return {{"p_a", p.p_a},
          {"p_b", p.p_b},
          {"p_a_and_b", p.p_a_and_b},
          {"interference", p.interference},
          {"fallacy_wrt_a", p.fallacy_wrt_a},
          {"fallacy_wrt_b", p.fallacy_wrt_b}};
}

void emit(const ordered_json& j, const std::string& markdown, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << markdown;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meaning bonds, overextension diagnostics and quantum conjunction models over document corpora"};
  app.require_subcommand(1);

  std::string format = "markdown";
  bool full_precision = false;
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "markdown"}));
    cmd->add_flag("--full-precision", full_precision, "Print numbers at full precision");
  };

  // index
  auto* cmd_index = app.add_subcommand("index", "Build an index from a JSON-lines corpus");
  std::string corpus_path, index_out;
  bool no_case_folding = false;
  std::vector<std::string> stop_words;
  cmd_index->add_option("corpus", corpus_path, "Corpus file (one {\"id\",\"text\"} object per line)")->required();
  cmd_index->add_option("-o,--out", index_out, "Index file to write")->required();
  cmd_index->add_flag("--no-case-folding", no_case_folding, "Keep token case");
  cmd_index->add_option("--stop-words", stop_words, "Terms treated as stop words in reports");

  // count
  auto* cmd_count = app.add_subcommand("count", "Count documents matching a canonical query");
  ProviderArgs count_provider;
  std::string query_text;
  add_provider_options(cmd_count, count_provider);
  cmd_count->add_option("query", query_text, "Query, e.g. and(term(\"pet\"),term(\"fish\"))")->required();
  bool list_docs = false;
  cmd_count->add_flag("--docs", list_docs, "Also list matching document ids (local index only)");

  // triad
  auto* cmd_triad = app.add_subcommand("triad", "Full EE/OE/dominance analysis for terms A, B, C and phrase AB");
  ProviderArgs triad_provider;
  std::string term_a, term_b, term_c, phrase;
  double dominance_threshold = 10.0;
  std::optional<double> margin, neutral_band;
  add_provider_options(cmd_triad, triad_provider);
  cmd_triad->add_option("--a", term_a)->required();
  cmd_triad->add_option("--b", term_b)->required();
  cmd_triad->add_option("--c", term_c)->required();
  cmd_triad->add_option("--phrase", phrase, "The combination AB, e.g. \"pet fish\"")->required();
  cmd_triad->add_option("--dominance-threshold", dominance_threshold, "Flag EE dominance at or above this ratio");
  cmd_triad->add_option("--margin", margin, "Overextension margin: ratios must exceed 1 + margin");
  cmd_triad->add_option("--neutral-band", neutral_band, "Meaning-bond neutrality band");
  add_format(cmd_triad);

  // record
  auto* cmd_record = app.add_subcommand("record", "Save a triad's counts from a local index into a count cache");
  std::string record_index, record_out;
  std::string rec_a, rec_b, rec_c, rec_phrase;
  cmd_record->add_option("--index", record_index)->required();
  cmd_record->add_option("--a", rec_a)->required();
  cmd_record->add_option("--b", rec_b)->required();
  cmd_record->add_option("--c", rec_c)->required();
  cmd_record->add_option("--phrase", rec_phrase)->required();
  cmd_record->add_option("-o,--out", record_out)->required();

  // bond
  auto* cmd_bond = app.add_subcommand("bond", "Meaning bond M(A,B) and its conditional forms");
  ProviderArgs bond_provider;
  std::string bond_a, bond_b;
  std::optional<double> bond_band;
  add_provider_options(cmd_bond, bond_provider);
  cmd_bond->add_option("--a", bond_a)->required();
  cmd_bond->add_option("--b", bond_b)->required();
  cmd_bond->add_option("--neutral-band", bond_band, "Neutrality band (default 1e-9 local, 0.05 recorded)");
  add_format(cmd_bond);

  // quantum
  auto* cmd_quantum = app.add_subcommand("quantum", "Quantum conjunction models");
  cmd_quantum->require_subcommand(1);
  std::uint64_t seed = 20161119;
  long dim = 0;
  std::vector<double> targets;
  auto* cmd_ee_fit = cmd_quantum->add_subcommand("ee-fit", "Fit the superposition model to p(A) p(B) p(A and B)");
  auto* cmd_oe_fit = cmd_quantum->add_subcommand("oe-fit", "Fit the sequential model to p(A) p(B) p(A then B)");
  for (auto* c : {cmd_ee_fit, cmd_oe_fit}) {
    c->add_option("probabilities", targets, "Three target probabilities")->required()->expected(3);
    c->add_option("--dim", dim, "Hilbert-space dimension (default 3 for ee-fit, 2 for oe-fit)");
    c->add_option("--seed", seed, "Seed for the deterministic random generator");
    add_format(c);
  }
  auto* cmd_oe_demo = cmd_quantum->add_subcommand("oe-demo", "Randomized check that p(A then B) never exceeds p(A)");
  int samples = 1000;
  long min_dim = 2, max_dim = 6;
  cmd_oe_demo->add_option("--samples", samples)->check(CLI::PositiveNumber);
  cmd_oe_demo->add_option("--min-dim", min_dim)->check(CLI::Range(1, 64));
  cmd_oe_demo->add_option("--max-dim", max_dim)->check(CLI::Range(1, 64));
  cmd_oe_demo->add_option("--seed", seed);
  add_format(cmd_oe_demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_index) {
      TokenizerConfig config;
      config.case_folding = !no_case_folding;
      config.stop_words = {stop_words.begin(), stop_words.end()};
      auto docs = read_corpus(corpus_path);
      auto index = Index::build(docs, config);
      index.save(index_out);
      if (docs.empty()) std::cerr << "warning: corpus " << corpus_path << " contains no documents\n";
      std::cout << index.doc_count() << " documents, " << index.term_count() << " distinct terms -> " << index_out
                << "\n";
      return kExitOk;
    }

    if (*cmd_count) {
      auto provider = open_provider(count_provider);
      auto query = parse_query(query_text);
      auto obs = provider->get_count(query);
      std::cout << obs.query << "\t" << format_number(obs.count, true) << "\n";
      if (list_docs) {
        auto* local = dynamic_cast<LocalProvider*>(provider.get());
        if (!local) throw UsageError("--docs needs a local index");
        for (const auto& id : local->index().matching_docs(query)) std::cout << id << "\n";
      }
      return kExitOk;
    }

    if (*cmd_triad) {
      auto provider = open_provider(triad_provider);
      require_positive(dominance_threshold, "--dominance-threshold");
      if (margin && *margin < 0) throw UsageError("--margin must be nonnegative");
      if (neutral_band) require_positive(*neutral_band, "--neutral-band");
      AnalysisOptions options;
      options.dominance_threshold = dominance_threshold;
      options.overextension_margin = margin;
      options.neutral_band = neutral_band;
      auto analysis = analyze_triad(*provider, term_a, term_b, term_c, split_phrase(phrase, provider->tokenizer()),
                                    options);
      for (const auto& v : analysis.consistency.violations()) std::cerr << "audit: violated " << v << "\n";
      emit(triad_report_json(analysis), triad_report_markdown(analysis, full_precision), format);
      return kExitOk;
    }

    if (*cmd_record) {
      auto index = std::make_shared<const Index>(Index::load(record_index));
      LocalProvider local(index, fs::path(record_index).filename().string());
      CacheHeader header;
      header.fixture = fs::path(record_out).stem().string();
      header.description = "counts recorded from local index " + fs::path(record_index).filename().string();
      header.case_folding = index->tokenizer().case_folding;
      RecordedProvider cache(header);
      record_triad(local, cache, rec_a, rec_b, rec_c, split_phrase(rec_phrase, index->tokenizer()));
      cache.save(record_out);
      std::cout << cache.size() << " observations -> " << record_out << "\n";
      return kExitOk;
    }

    if (*cmd_bond) {
      auto provider = open_provider(bond_provider);
      const double band = bond_band.value_or(provider->source() == CountSource::local_index ? kExactNeutralBand
                                                                                             : kRecordedNeutralBand);
      auto n_a = provider->get_count(Query::term(bond_a)).count;
      auto n_b = provider->get_count(Query::term(bond_b)).count;
      auto n_ab = provider->get_count(Query::all_of({Query::term(bond_a), Query::term(bond_b)})).count;
      auto n_w = provider->total_documents();
      auto bond = meaning_bond(n_ab, n_a, n_b, n_w, band);
      const double p_a_given_b = conditional_probability(n_ab, n_b).value;
      const double p_b_given_a = conditional_probability(n_ab, n_a).value;
      const double p_a = landing_probability(n_a, *n_w).value;
      const double p_b = landing_probability(n_b, *n_w).value;
      ordered_json j = {{"schema", "wwwstory.bond/1"},
                        {"a", bond_a},
                        {"b", bond_b},
                        {"counts", {{"n_W", *n_w}, {"n_A", n_a}, {"n_B", n_b}, {"n_A_B", n_ab}}},
                        {"meaning_bond", bond.value},
                        {"classification", to_string(bond.classification)},
                        {"neutral_band", band},
                        {"p_a_given_b_over_p_a", p_a > 0 ? ordered_json(p_a_given_b / p_a) : ordered_json(nullptr)},
                        {"p_b_given_a_over_p_b", p_b > 0 ? ordered_json(p_b_given_a / p_b) : ordered_json(nullptr)}};
      auto n = [&](double v) { return format_number(v, full_precision); };
      std::string md = "| quantity | value |\n|---|---|\n";
      md += "| M(" + bond_a + "," + bond_b + ") | " + n(bond.value) + " |\n";
      md += "| classification | " + to_string(bond.classification) + " |\n";
      md += "| p(A|B) / p(A) | " + n(p_a_given_b / p_a) + " |\n";
      md += "| p(B|A) / p(B) | " + n(p_b_given_a / p_b) + " |\n";
      emit(j, md, format);
      return kExitOk;
    }

    if (*cmd_ee_fit || *cmd_oe_fit) {
      for (std::size_t i = 0; i < targets.size(); ++i) require_probability(targets[i], "target probability");
      std::mt19937_64 rng(seed);
      ordered_json j;
      std::string md;
      auto n = [&](double v) { return format_number(v, full_precision); };
      if (*cmd_ee_fit) {
        auto fit = quantum::ee_fit(targets[0], targets[1], targets[2], dim ? dim : 3, rng);
        auto cls = quantum::ee_fallacy_classification(targets[0], targets[1], fit.required_interference);
        j = {{"schema", "wwwstory.ee_fit/1"},
             {"status", fit.status == quantum::FitStatus::feasible ? "feasible" : "infeasible"},
             {"targets", {{"p_a", targets[0]}, {"p_b", targets[1]}, {"p_a_and_b", targets[2]}}},
             {"required_interference", fit.required_interference},
             {"bound", fit.bound},
             {"classification", to_string(cls.classification)}};
        md = "| quantity | value |\n|---|---|\n";
        md += "| status | " + std::string(fit.model ? "feasible" : "infeasible") + " |\n";
        md += "| required interference t | " + n(fit.required_interference) + " |\n";
        md += "| bound | " + n(fit.bound) + " |\n";
        md += "| classification | " + to_string(cls.classification) + " |\n";
        if (fit.model) {
          j["dim"] = fit.dim;
          j["residual"] = fit.residual;
          j["prediction"] = prediction_json(fit.prediction);
          j["model"] = quantum::to_json(*fit.model);
          md += "| dim | " + std::to_string(fit.dim) + " |\n";
          md += "| residual | " + n(fit.residual) + " |\n";
          md += "\n```json\n" + quantum::to_json(*fit.model).dump() + "\n```\n";
        } else {
          j["verdict"] = fit.verdict;
          md += "\n" + fit.verdict + "\n";
        }
      } else {
        auto fit = quantum::oe_fit(targets[0], targets[1], targets[2], dim ? dim : 2, rng);
        j = {{"schema", "wwwstory.oe_fit/1"},
             {"status", fit.status == quantum::FitStatus::feasible ? "feasible" : "infeasible"},
             {"targets", {{"p_a", targets[0]}, {"p_b", targets[1]}, {"p_a_then_b", targets[2]}}}};
        md = "| quantity | value |\n|---|---|\n";
        md += "| status | " + std::string(fit.model ? "feasible" : "infeasible") + " |\n";
        if (fit.model) {
          j["dim"] = fit.dim;
          j["dimension_bumped"] = fit.dimension_bumped;
          j["residual"] = fit.residual;
          j["prediction"] = prediction_json(fit.prediction);
          j["model"] = quantum::to_json(*fit.model);
          md += "| dim | " + std::to_string(fit.dim) + (fit.dimension_bumped ? " (bumped)" : "") + " |\n";
          md += "| residual | " + n(fit.residual) + " |\n";
          md += "| Int_B | " + n(fit.prediction.int_b) + " |\n";
          md += "\n```json\n" + quantum::to_json(*fit.model).dump() + "\n```\n";
        } else {
          j["verdict"] = fit.verdict;
          md += "\n" + fit.verdict + "\n";
        }
      }
      emit(j, md, format);
      return kExitOk;
    }

    if (*cmd_oe_demo) {
      if (min_dim > max_dim) throw UsageError("--min-dim exceeds --max-dim");
      std::mt19937_64 rng(seed);
      double max_margin = -std::numeric_limits<double>::infinity();
      double max_residual = 0;
      int violations = 0;
      for (int i = 0; i < samples; ++i) {
        auto prediction = quantum::oe_forward(quantum::random_oe_model(rng, min_dim, max_dim));
        auto check = quantum::oe_no_double_fallacy_check(prediction);
        max_margin = std::max(max_margin, check.margin);
        max_residual = std::max(max_residual, prediction.identity_residual);
        if (!check.holds) ++violations;
      }
      ordered_json j = {{"schema", "wwwstory.oe_demo/1"},
                        {"samples", samples},
                        {"seed", seed},
                        {"min_dim", min_dim},
                        {"max_dim", max_dim},
                        {"max_p_a_then_b_minus_p_a", max_margin},
                        {"max_identity_residual", max_residual},
                        {"violations", violations}};
      std::string md = "| quantity | value |\n|---|---|\n";
      md += "| samples | " + std::to_string(samples) + " |\n";
      md += "| max p(A then B) - p(A) | " + format_number(max_margin, full_precision) + " |\n";
      md += "| max identity residual | " + format_number(max_residual, full_precision) + " |\n";
      md += "| violations | " + std::to_string(violations) + " |\n";
      emit(j, md, format);
      return violations == 0 ? kExitOk : kExitInternal;
    }
  } catch (const MissingObservationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
