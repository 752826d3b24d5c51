#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "wwwstory/index.hpp"
#include "wwwstory/query.hpp"

namespace wwwstory {

enum class CountSource { local_index, recorded_external };

std::string to_string(CountSource source);
CountSource count_source_from_string(const std::string& s);

struct CountObservation {
  std::string query;  // canonical form
  double count = 0;   // may be a rounded magnitude such as 7.14e8
  CountSource source = CountSource::local_index;
  std::string observed_at;
  std::string notes;

  bool operator==(const CountObservation&) const = default;
};

/// Anything that can answer "how many documents match this query".
///
/// Implementations must be safe for concurrent get_count calls. A live
/// search-engine client would implement this interface too; none ships here.
class CountProvider {
 public:
  virtual ~CountProvider() = default;

  virtual CountObservation get_count(const Query& query) const = 0;
  /// Total number of documents (n_W), when the source knows it.
  virtual std::optional<double> total_documents() const = 0;
  virtual CountSource source() const = 0;
  /// Human-readable provenance (index path, fixture name).
  virtual std::string name() const = 0;
  /// Normalization applied to user-supplied terms.
  virtual TokenizerConfig tokenizer() const = 0;
};

class LocalProvider final : public CountProvider {
 public:
  explicit LocalProvider(std::shared_ptr<const Index> index, std::string name = "local");

  CountObservation get_count(const Query& query) const override;
  std::optional<double> total_documents() const override;
  CountSource source() const override { return CountSource::local_index; }
  std::string name() const override { return name_; }
  TokenizerConfig tokenizer() const override { return index_->tokenizer(); }

  const Index& index() const noexcept { return *index_; }

 private:
  std::shared_ptr<const Index> index_;
  std::string name_;
};

/// Four rare Italian words excluded from every query so the search engine
/// answers all of them with the same search depth.
const std::set<std::string>& default_exclusion_terms();

struct CacheHeader {
  int schema_version = 1;
  std::string fixture;
  std::string description;
  std::set<std::string> exclusions;
  bool case_folding = true;
  std::optional<double> n_w;

  bool operator==(const CacheHeader&) const = default;
};

/// Count cache backed by a JSON-lines file of recorded observations.
///
/// Queries are looked up after case folding and, when the header lists
/// exclusion terms, after wrapping them in excluding(q, exclusions), so
/// fixtures are keyed on the decorated query.
class RecordedProvider final : public CountProvider {
 public:
  explicit RecordedProvider(CacheHeader header = {});
  RecordedProvider(RecordedProvider&& other) noexcept;
  RecordedProvider& operator=(RecordedProvider&& other) noexcept;

  CountObservation get_count(const Query& query) const override;
  std::optional<double> total_documents() const override { return header_.n_w; }
  CountSource source() const override;
  std::string name() const override { return header_.fixture; }
  TokenizerConfig tokenizer() const override;

  /// The lookup key for `query`: normalized, decorated, canonical.
  std::string cache_key(const Query& query) const;

  /// Inserts or replaces the observation for `query`. Stores it under cache_key(query).
  void add(const Query& query, CountObservation observation);
  void set_total_documents(std::optional<double> n_w);
  /// Replaces the decoration applied to future lookups; stored keys are untouched.
  void set_exclusions(std::set<std::string> exclusions);

  const CacheHeader& header() const noexcept { return header_; }
  std::vector<CountObservation> observations() const;
  std::size_t size() const;

  /// Atomic write: header record then observations ordered by key.
  void save(const std::filesystem::path& path) const;
  /// Throws IoError, FormatVersionError, or ParseError (with the 1-based line).
  static RecordedProvider load(const std::filesystem::path& path);

 private:
  CacheHeader header_;
  std::map<std::string, CountObservation> observations_;
  std::unique_ptr<std::shared_mutex> mutex_;
};

struct TriadLabels {
  std::string a, b, c, ab;
};

/// The eleven counts a triad analysis consumes. `n_W` is absent for sources
/// that never report a total.
struct TriadCounts {
  std::optional<double> n_W;
  double n_A = 0, n_B = 0, n_C = 0;
  double n_AB = 0;  // strict adjacent combination
  double n_A_B = 0, n_A_C = 0, n_B_C = 0;
  double n_AB_C = 0, n_A_B_C = 0;
  double n_A_notB = 0;
  TriadLabels labels;
  CountSource source = CountSource::local_index;
  std::string provider_name;
  // One observation per count above except n_W, in declaration order.
  std::vector<CountObservation> provenance;
};

/// The ten triad queries, in TriadCounts declaration order, paired with their count names.
std::vector<std::pair<std::string, Query>> triad_queries(const std::string& a, const std::string& b,
                                                         const std::string& c, const std::vector<std::string>& phrase);

/// Resolves all counts. Throws MissingObservationError listing every gap, or
/// UsageError when the phrase does not contain both a and b.
TriadCounts get_triad_counts(const CountProvider& provider, const std::string& a, const std::string& b,
                             const std::string& c, const std::vector<std::string>& phrase);

enum class CheckStatus { satisfied, violated, not_applicable };

struct ConsistencyCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  CheckStatus status = CheckStatus::satisfied;
};

struct ConsistencyReport {
  std::vector<ConsistencyCheck> checks;
  bool all_satisfied() const;
  std::vector<std::string> violations() const;
};

/// Relative slack used when auditing rounded (3 significant figure) counts:
/// half a unit in the last printed digit.
inline constexpr double kRecordedAuditTolerance = 5e-3;

/// Checks every TriadCounts invariant once. Exact for local counts; recorded
/// counts get `relative_tolerance` (default kRecordedAuditTolerance) of slack.
ConsistencyReport audit(const TriadCounts& counts, std::optional<double> relative_tolerance = std::nullopt);

/// Records the triad's observations from `source` into `cache` (which should
/// have no exclusions, so keys match the undecorated queries).
void record_triad(const CountProvider& source, RecordedProvider& cache, const std::string& a, const std::string& b,
                  const std::string& c, const std::vector<std::string>& phrase);

}  // namespace wwwstory
