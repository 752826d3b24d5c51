#include "wwwstory/providers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>

#include "wwwstory/errors.hpp"
#include "wwwstory/io_util.hpp"

namespace wwwstory {

using nlohmann::ordered_json;

std::string to_string(CountSource source) {
  return source == CountSource::local_index ? "local_index" : "recorded_external";
}

CountSource count_source_from_string(const std::string& s) {
  if (s == "local_index") return CountSource::local_index;
  if (s == "recorded_external") return CountSource::recorded_external;
  throw UsageError("unknown count source '" + s + "'");
}

LocalProvider::LocalProvider(std::shared_ptr<const Index> index, std::string name)
    : index_(std::move(index)), name_(std::move(name)) {
  if (!index_) throw UsageError("local provider needs an index");
}

CountObservation LocalProvider::get_count(const Query& query) const {
  auto n = index_->count(query);
  return CountObservation{query.normalized(index_->tokenizer()).canonical(), static_cast<double>(n),
                          CountSource::local_index, index_->built_at(), {}};
}

std::optional<double> LocalProvider::total_documents() const { return static_cast<double>(index_->doc_count()); }

const std::set<std::string>& default_exclusion_terms() {
  static const std::set<std::string> terms{"barbablu", "miseriaccia", "acciderpoli", "tristobello"};
  return terms;
}

RecordedProvider::RecordedProvider(CacheHeader header)
    : header_(std::move(header)), mutex_(std::make_unique<std::shared_mutex>()) {}

RecordedProvider::RecordedProvider(RecordedProvider&& other) noexcept
    : header_(std::move(other.header_)),
      observations_(std::move(other.observations_)),
      mutex_(std::move(other.mutex_)) {
  other.mutex_ = std::make_unique<std::shared_mutex>();
}

RecordedProvider& RecordedProvider::operator=(RecordedProvider&& other) noexcept {
  header_ = std::move(other.header_);
  observations_ = std::move(other.observations_);
  std::swap(mutex_, other.mutex_);
  return *this;
}

TokenizerConfig RecordedProvider::tokenizer() const {
  TokenizerConfig config;
  config.case_folding = header_.case_folding;
  return config;
}

std::string RecordedProvider::cache_key(const Query& query) const {
  query.validate();
  Query q = query.normalized(tokenizer());
  if (!header_.exclusions.empty() && q.kind() != Query::Kind::excluding) {
    q = Query::excluding(std::move(q), header_.exclusions).normalized(tokenizer());
  }
  return q.canonical();
}

CountObservation RecordedProvider::get_count(const Query& query) const {
  auto key = cache_key(query);
  std::shared_lock lock(*mutex_);
  auto it = observations_.find(key);
  if (it == observations_.end()) throw MissingObservationError({key});
  return it->second;
}

CountSource RecordedProvider::source() const {
  std::shared_lock lock(*mutex_);
  if (observations_.empty()) return CountSource::recorded_external;
  bool all_local = std::all_of(observations_.begin(), observations_.end(),
                               [](const auto& kv) { return kv.second.source == CountSource::local_index; });
  return all_local ? CountSource::local_index : CountSource::recorded_external;
}

void RecordedProvider::add(const Query& query, CountObservation observation) {
  if (!(observation.count >= 0)) throw UsageError("observation count must be nonnegative");
  auto key = cache_key(query);
  observation.query = key;
  std::unique_lock lock(*mutex_);
  observations_[key] = std::move(observation);
}

void RecordedProvider::set_total_documents(std::optional<double> n_w) {
  std::unique_lock lock(*mutex_);
  header_.n_w = n_w;
}

void RecordedProvider::set_exclusions(std::set<std::string> exclusions) {
  std::unique_lock lock(*mutex_);
  header_.exclusions = std::move(exclusions);
}

std::vector<CountObservation> RecordedProvider::observations() const {
  std::shared_lock lock(*mutex_);
  std::vector<CountObservation> out;
  out.reserve(observations_.size());
  for (const auto& [key, obs] : observations_) out.push_back(obs);
  return out;
}

std::size_t RecordedProvider::size() const {
  std::shared_lock lock(*mutex_);
  return observations_.size();
}

namespace {

constexpr const char* kHeaderRecord = "header";

ordered_json header_to_json(const CacheHeader& h) {
  ordered_json j;
  j["record"] = kHeaderRecord;
  j["schema_version"] = h.schema_version;
  j["fixture"] = h.fixture;
  j["description"] = h.description;
  j["exclusions"] = h.exclusions;
  j["case_folding"] = h.case_folding;
  j["n_W"] = h.n_w ? ordered_json(*h.n_w) : ordered_json(nullptr);
  return j;
}

ordered_json observation_to_json(const CountObservation& o) {
  ordered_json j;
  j["query"] = o.query;
  j["count"] = o.count;
  j["source"] = to_string(o.source);
  j["observed_at"] = o.observed_at;
  if (!o.notes.empty()) j["notes"] = o.notes;
  return j;
}

}  // namespace

void RecordedProvider::save(const std::filesystem::path& path) const {
  std::string out;
  {
    std::shared_lock lock(*mutex_);
    out = header_to_json(header_).dump() + "\n";
    for (const auto& [key, obs] : observations_) out += observation_to_json(obs).dump() + "\n";
  }
  write_file_atomically(path, out);
}

RecordedProvider RecordedProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open count cache: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::optional<RecordedProvider> provider;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw ParseError(std::string("malformed JSON in count cache: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("cache record must be a JSON object", line_no);

    if (!provider) {
      if (j.value("record", "") != kHeaderRecord) throw ParseError("count cache must start with a header record", line_no);
      CacheHeader h;
      try {
        h.schema_version = j.at("schema_version").get<int>();
        if (h.schema_version != 1) {
          throw FormatVersionError("count cache schema version " + std::to_string(h.schema_version) +
                                   " is not supported (expected 1)");
        }
        h.fixture = j.value("fixture", "");
        h.description = j.value("description", "");
        h.exclusions = j.value("exclusions", std::set<std::string>{});
        h.case_folding = j.value("case_folding", true);
        if (j.contains("n_W") && !j["n_W"].is_null()) h.n_w = j["n_W"].get<double>();
      } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("bad cache header: ") + e.what(), line_no);
      }
      provider.emplace(std::move(h));
      continue;
    }

    CountObservation obs;
    std::string query_text;
    try {
      query_text = j.at("query").get<std::string>();
      obs.count = j.at("count").get<double>();
      obs.source = count_source_from_string(j.value("source", "recorded_external"));
      obs.observed_at = j.value("observed_at", "");
      obs.notes = j.value("notes", "");
    } catch (const ordered_json::exception& e) {
      throw ParseError(std::string("bad observation record: ") + e.what(), line_no);
    } catch (const UsageError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!(obs.count >= 0) || !std::isfinite(obs.count)) throw ParseError("count must be a nonnegative number", line_no);
    Query q = [&] {
      try {
        return parse_query(query_text);
      } catch (const StructuralQueryError& e) {
        throw ParseError(e.what(), line_no);
      }
    }();
    // Stored keys are already decorated; do not decorate twice.
    std::string key = q.normalized(provider->tokenizer()).canonical();
    if (provider->observations_.count(key)) throw ParseError("duplicate observation for " + key, line_no);
    obs.query = key;
    provider->observations_.emplace(std::move(key), std::move(obs));
  }
  if (!provider) throw ParseError("count cache is empty (no header record): " + path.string(), 0);
  return std::move(*provider);
}

std::vector<std::pair<std::string, Query>> triad_queries(const std::string& a, const std::string& b,
                                                         const std::string& c, const std::vector<std::string>& phrase) {
  auto A = Query::term(a), B = Query::term(b), C = Query::term(c);
  auto AB = Query::phrase(phrase);
  return {
      {"n_A", A},
      {"n_B", B},
      {"n_C", C},
      {"n_AB", AB},
      {"n_A_B", Query::all_of({A, B})},
      {"n_A_C", Query::all_of({A, C})},
      {"n_B_C", Query::all_of({B, C})},
      {"n_AB_C", Query::all_of({AB, C})},
      {"n_A_B_C", Query::all_of({A, B, C})},
      {"n_A_notB", Query::and_not(A, B)},
  };
}

namespace {

void check_triad_terms(const TokenizerConfig& config, const std::string& a, const std::string& b,
                       const std::vector<std::string>& phrase) {
  auto na = normalize_term(a, config), nb = normalize_term(b, config);
  std::vector<std::string> np;
  for (const auto& t : phrase) np.push_back(normalize_term(t, config));
  if (np.size() < 2) throw StructuralQueryError("the combination phrase needs at least 2 terms");
  if (std::find(np.begin(), np.end(), na) == np.end() || std::find(np.begin(), np.end(), nb) == np.end()) {
    throw UsageError("the combination phrase must contain both '" + a + "' and '" + b + "'");
  }
}

}  // namespace

TriadCounts get_triad_counts(const CountProvider& provider, const std::string& a, const std::string& b,
                             const std::string& c, const std::vector<std::string>& phrase) {
  check_triad_terms(provider.tokenizer(), a, b, phrase);

  TriadCounts counts;
  counts.n_W = provider.total_documents();
  std::string phrase_label;
  for (const auto& t : phrase) phrase_label += (phrase_label.empty() ? "" : " ") + t;
  counts.labels = {a, b, c, phrase_label};
  counts.provider_name = provider.name();

  double* slots[] = {&counts.n_A,  &counts.n_B,   &counts.n_C,    &counts.n_AB,    &counts.n_A_B,
                     &counts.n_A_C, &counts.n_B_C, &counts.n_AB_C, &counts.n_A_B_C, &counts.n_A_notB};
  std::vector<std::string> missing;
  auto queries = triad_queries(a, b, c, phrase);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    try {
      auto obs = provider.get_count(queries[i].second);
      *slots[i] = obs.count;
      counts.provenance.push_back(std::move(obs));
    } catch (const MissingObservationError& e) {
      for (const auto& q : e.queries()) missing.push_back(queries[i].first + " = " + q);
    }
  }
  if (!missing.empty()) throw MissingObservationError(std::move(missing));

  bool all_local = std::all_of(counts.provenance.begin(), counts.provenance.end(),
                               [](const auto& o) { return o.source == CountSource::local_index; });
  counts.source = all_local ? CountSource::local_index : CountSource::recorded_external;
  return counts;
}

bool ConsistencyReport::all_satisfied() const {
  return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::violated; });
}

std::vector<std::string> ConsistencyReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (c.status == CheckStatus::violated) out.push_back(c.name);
  }
  return out;
}

ConsistencyReport audit(const TriadCounts& k, std::optional<double> relative_tolerance) {
  const double tol =
      relative_tolerance.value_or(k.source == CountSource::local_index ? 0.0 : kRecordedAuditTolerance);
  ConsistencyReport report;
  auto leq = [&](std::string name, double lhs, double rhs) {
    bool ok = lhs <= rhs + tol * std::max(std::abs(lhs), std::abs(rhs));
    report.checks.push_back({std::move(name), lhs, rhs, ok ? CheckStatus::satisfied : CheckStatus::violated});
  };
  auto eq = [&](std::string name, double lhs, double rhs) {
    bool ok = std::abs(lhs - rhs) <= tol * std::max(std::abs(lhs), std::abs(rhs));
    report.checks.push_back({std::move(name), lhs, rhs, ok ? CheckStatus::satisfied : CheckStatus::violated});
  };

  leq("n_A_B_C <= n_A_B", k.n_A_B_C, k.n_A_B);
  leq("n_A_B_C <= n_A_C", k.n_A_B_C, k.n_A_C);
  leq("n_A_B_C <= n_B_C", k.n_A_B_C, k.n_B_C);
  leq("n_A_B <= n_A", k.n_A_B, k.n_A);
  leq("n_A_B <= n_B", k.n_A_B, k.n_B);
  leq("n_A_C <= n_A", k.n_A_C, k.n_A);
  leq("n_A_C <= n_C", k.n_A_C, k.n_C);
  leq("n_B_C <= n_B", k.n_B_C, k.n_B);
  leq("n_B_C <= n_C", k.n_B_C, k.n_C);
  leq("n_AB <= n_A_B", k.n_AB, k.n_A_B);
  leq("n_AB_C <= n_AB", k.n_AB_C, k.n_AB);
  leq("n_AB_C <= n_A_B_C", k.n_AB_C, k.n_A_B_C);
  eq("n_A = n_A_B + n_A_notB", k.n_A, k.n_A_B + k.n_A_notB);

  const std::pair<const char*, double> bounded[] = {
      {"n_A", k.n_A},     {"n_B", k.n_B},     {"n_C", k.n_C},       {"n_AB", k.n_AB},       {"n_A_B", k.n_A_B},
      {"n_A_C", k.n_A_C}, {"n_B_C", k.n_B_C}, {"n_AB_C", k.n_AB_C}, {"n_A_B_C", k.n_A_B_C}, {"n_A_notB", k.n_A_notB}};
  for (const auto& [name, value] : bounded) {
    std::string check = std::string(name) + " <= n_W";
    if (k.n_W) {
      leq(std::move(check), value, *k.n_W);
    } else {
      report.checks.push_back({std::move(check), value, 0.0, CheckStatus::not_applicable});
    }
  }
  return report;
}

void record_triad(const CountProvider& source, RecordedProvider& cache, const std::string& a, const std::string& b,
                  const std::string& c, const std::vector<std::string>& phrase) {
  cache.set_total_documents(source.total_documents());
  for (const auto& [name, query] : triad_queries(a, b, c, phrase)) cache.add(query, source.get_count(query));
}

}  // namespace wwwstory
