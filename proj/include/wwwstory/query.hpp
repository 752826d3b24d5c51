#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wwwstory/tokenizer.hpp"

namespace wwwstory {

/// Count query over document membership.
///
///   term(t)            documents containing t
///   phrase(t1,...,tn)  documents containing t1..tn at consecutive positions, in order
///   and(q1,...,qn)     documents matching every child (children form a set)
///   andnot(p,n)        documents matching p but not n
///   excluding(q,[..])  q minus documents containing any listed term; outermost only
///
/// Factories do not validate; validate() enforces the structural rules so
/// malformed queries can be represented and rejected with a precise message.
class Query {
 public:
  enum class Kind { term, phrase, conjunction, and_not, excluding };

  static Query term(std::string text);
  static Query phrase(std::vector<std::string> terms);
  static Query all_of(std::vector<Query> children);
  static Query and_not(Query positive, Query negative);
  static Query excluding(Query inner, std::set<std::string> excluded);

  Kind kind() const noexcept { return kind_; }
  /// The single term of a term query.
  const std::string& text() const;
  /// Phrase terms, or the excluded terms (sorted) of an excluding query.
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  /// conjunction: the children; and_not: {positive, negative}; excluding: {inner}.
  const std::vector<Query>& children() const noexcept { return children_; }

  /// Throws StructuralQueryError on: empty terms, phrase < 2 terms, and < 2 children,
  /// excluding anywhere but the root.
  void validate() const;

  /// Terms run through the tokenizer's normalization; conjunction children
  /// deduplicated. Throws StructuralQueryError for terms that are not single tokens.
  Query normalized(const TokenizerConfig& config) const;

  /// Unique textual key: structurally equal queries (conjunction order and
  /// excluded-term order ignored) produce the same string. parse_query inverts it.
  std::string canonical() const;

  bool operator==(const Query& other) const { return canonical() == other.canonical(); }

 private:
  Query(Kind kind, std::vector<std::string> terms, std::vector<Query> children)
      : kind_(kind), terms_(std::move(terms)), children_(std::move(children)) {}
  void validate_at(bool root) const;

  Kind kind_;
  std::vector<std::string> terms_;
  std::vector<Query> children_;
};

/// Parses the canonical syntax (whitespace between tokens is tolerated).
/// Throws StructuralQueryError with the failing offset.
Query parse_query(std::string_view text);

}  // namespace wwwstory
