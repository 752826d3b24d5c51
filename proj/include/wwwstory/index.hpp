#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wwwstory/query.hpp"
#include "wwwstory/tokenizer.hpp"

namespace wwwstory {

struct Document {
  std::string id;
  std::string text;
  std::map<std::string, std::string> meta;
};

/// Occurrences of one term in one document. `doc` is the document ordinal,
/// i.e. the position of its id in Index::doc_ids().
struct Posting {
  std::uint32_t doc = 0;
  std::vector<std::uint32_t> positions;

  bool operator==(const Posting&) const = default;
};

using PostingList = std::vector<Posting>;

/// Immutable positional inverted index. Documents are ordered by id, so the
/// index does not depend on the order the corpus was supplied in.
class Index {
 public:
  Index() = default;

  /// Throws DuplicateDocumentError for repeated ids and ParseError for blank texts.
  /// `built_at` is recorded verbatim; empty means "now" (UTC, ISO-8601).
  static Index build(std::span<const Document> corpus, const TokenizerConfig& config = {},
                     std::string built_at = {});

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t term_count() const noexcept { return postings_.size(); }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  const TokenizerConfig& tokenizer() const noexcept { return tokenizer_; }
  const std::string& built_at() const noexcept { return built_at_; }
  const std::map<std::string, PostingList, std::less<>>& postings() const noexcept { return postings_; }
  /// nullptr when the term never occurs.
  const PostingList* find(std::string_view term) const;

  /// Number of documents matching `query`. Terms are normalized with this
  /// index's tokenizer config. Throws StructuralQueryError for malformed queries.
  std::uint64_t count(const Query& query) const;
  /// Ids of matching documents, sorted. Always has count(query) entries.
  std::vector<std::string> matching_docs(const Query& query) const;

  /// Binary container, see README for the layout. Written atomically.
  void save(const std::filesystem::path& path) const;
  /// Throws IoError, FormatVersionError or CorruptFileError.
  static Index load(const std::filesystem::path& path);

  bool operator==(const Index&) const = default;

 private:
  std::vector<std::uint32_t> evaluate(const Query& normalized) const;
  std::vector<std::uint32_t> evaluate_phrase(const std::vector<std::string>& terms) const;
  void check_invariants() const;

  TokenizerConfig tokenizer_;
  std::string built_at_;
  std::vector<std::string> doc_ids_;
  std::map<std::string, PostingList, std::less<>> postings_;
};

/// Reads the JSON-lines corpus format ({"id", "text", "meta"?} per line).
/// Blank lines are skipped; malformed lines raise ParseError with the line number.
std::vector<Document> read_corpus(const std::filesystem::path& path);

/// Current UTC time, ISO-8601 with seconds.
std::string utc_timestamp_now();

}  // namespace wwwstory
