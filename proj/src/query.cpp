#include "wwwstory/query.hpp"

#include <algorithm>

#include "wwwstory/errors.hpp"

namespace wwwstory {

Query Query::term(std::string text) { return Query(Kind::term, {std::move(text)}, {}); }

Query Query::phrase(std::vector<std::string> terms) { return Query(Kind::phrase, std::move(terms), {}); }

Query Query::all_of(std::vector<Query> children) { return Query(Kind::conjunction, {}, std::move(children)); }

Query Query::and_not(Query positive, Query negative) {
  std::vector<Query> children;
  children.push_back(std::move(positive));
  children.push_back(std::move(negative));
  return Query(Kind::and_not, {}, std::move(children));
}

Query Query::excluding(Query inner, std::set<std::string> excluded) {
  std::vector<Query> children;
  children.push_back(std::move(inner));
  return Query(Kind::excluding, {excluded.begin(), excluded.end()}, std::move(children));
}

const std::string& Query::text() const {
  if (kind_ != Kind::term) throw StructuralQueryError("text() called on a non-term query");
  return terms_.front();
}

void Query::validate() const { validate_at(true); }

void Query::validate_at(bool root) const {
  for (const auto& t : terms_) {
    if (t.empty()) throw StructuralQueryError("empty term in " + canonical());
  }
  switch (kind_) {
    case Kind::term:
      break;
    case Kind::phrase:
      if (terms_.size() < 2) throw StructuralQueryError("phrase needs at least 2 terms: " + canonical());
      break;
    case Kind::conjunction:
      if (children_.size() < 2) throw StructuralQueryError("and needs at least 2 children: " + canonical());
      break;
    case Kind::and_not:
      break;
    case Kind::excluding:
      if (!root) throw StructuralQueryError("excluding is only legal at the outermost level: " + canonical());
      if (terms_.empty()) throw StructuralQueryError("excluding needs at least one term: " + canonical());
      break;
  }
  for (const auto& child : children_) child.validate_at(false);
}

Query Query::normalized(const TokenizerConfig& config) const {
  std::vector<std::string> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back(normalize_term(t, config));
  std::vector<Query> children;
  children.reserve(children_.size());
  for (const auto& c : children_) children.push_back(c.normalized(config));
  if (kind_ == Kind::excluding) {
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  }
  if (kind_ == Kind::conjunction) {
    std::sort(children.begin(), children.end(),
              [](const Query& a, const Query& b) { return a.canonical() < b.canonical(); });
    children.erase(std::unique(children.begin(), children.end()), children.end());
    // and(x, x) after folding is just x
    if (children.size() == 1) return std::move(children.front());
  }
  return Query(kind_, std::move(terms), std::move(children));
}

namespace {

void append_quoted(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

void append_term_list(std::string& out, const std::vector<std::string>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out.push_back(',');
    append_quoted(out, terms[i]);
  }
}

}  // namespace

std::string Query::canonical() const {
  std::string out;
  switch (kind_) {
    case Kind::term:
      out = "term(";
      append_term_list(out, terms_);
      break;
    case Kind::phrase:
      out = "phrase(";
      append_term_list(out, terms_);
      break;
    case Kind::conjunction: {
      std::vector<std::string> parts;
      for (const auto& c : children_) parts.push_back(c.canonical());
      std::sort(parts.begin(), parts.end());
      parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
      out = "and(";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(',');
        out += parts[i];
      }
      break;
    }
    case Kind::and_not:
      out = "andnot(" + children_[0].canonical() + "," + children_[1].canonical();
      break;
    case Kind::excluding: {
      std::vector<std::string> sorted(terms_.begin(), terms_.end());
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      out = "excluding(" + children_[0].canonical() + ",[";
      append_term_list(out, sorted);
      out.push_back(']');
      break;
    }
  }
  out.push_back(')');
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Query parse_all() {
    Query q = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return q;
  }

 private:
  Query parse() {
    std::string name = identifier();
    expect('(');
    if (name == "term") {
      std::string t = quoted();
      expect(')');
      return Query::term(std::move(t));
    }
    if (name == "phrase") {
      auto terms = quoted_list(')');
      expect(')');
      return Query::phrase(std::move(terms));
    }
    if (name == "and") {
      std::vector<Query> children;
      children.push_back(parse());
      while (peek() == ',') {
        ++pos_;
        children.push_back(parse());
      }
      expect(')');
      return Query::all_of(std::move(children));
    }
    if (name == "andnot") {
      Query positive = parse();
      expect(',');
      Query negative = parse();
      expect(')');
      return Query::and_not(std::move(positive), std::move(negative));
    }
    if (name == "excluding") {
      Query inner = parse();
      expect(',');
      expect('[');
      auto terms = quoted_list(']');
      expect(']');
      expect(')');
      return Query::excluding(std::move(inner), {terms.begin(), terms.end()});
    }
    fail("unknown query operator '" + name + "'");
  }

  std::vector<std::string> quoted_list(char close) {
    std::vector<std::string> out;
    if (peek() == close) return out;
    out.push_back(quoted());
    while (peek() == ',') {
      ++pos_;
      out.push_back(quoted());
    }
    return out;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= 'a' && text_[pos_] <= 'z') ++pos_;
    if (start == pos_) fail("expected query operator");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("dangling escape");
        c = text_[pos_++];
      }
      out.push_back(c);
    }
    return out;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw StructuralQueryError("query parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Query parse_query(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace wwwstory
