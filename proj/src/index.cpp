#include "wwwstory/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iterator>
#include <nlohmann/json.hpp>
#include <thread>

#include "wwwstory/errors.hpp"
#include "wwwstory/io_util.hpp"

namespace wwwstory {

namespace {

using DocList = std::vector<std::uint32_t>;

DocList intersect(const DocList& a, const DocList& b) {
  DocList out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocList subtract(const DocList& a, const DocList& b) {
  DocList out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocList docs_of(const PostingList* list) {
  DocList out;
  if (!list) return out;
  out.reserve(list->size());
  for (const auto& p : *list) out.push_back(p.doc);
  return out;
}

const Posting* posting_for(const PostingList& list, std::uint32_t doc) {
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return it != list.end() && it->doc == doc ? &*it : nullptr;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

}  // namespace

std::string utc_timestamp_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Index Index::build(std::span<const Document> corpus, const TokenizerConfig& config, std::string built_at) {
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& doc = corpus[order[i]];
    if (i > 0 && corpus[order[i - 1]].id == doc.id) throw DuplicateDocumentError(doc.id);
    if (is_blank(doc.text)) throw ParseError("document '" + doc.id + "' has empty text", 0);
  }

  // Tokenization is pure, so it fans out; merging happens in id order.
  std::vector<std::vector<std::string>> tokens(order.size());
  std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  if (order.size() < 256) workers = 1;
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < order.size(); i += workers) tokens[i] = tokenize(corpus[order[i]].text, config);
    }));
  }
  for (auto& j : jobs) j.get();

  Index index;
  index.tokenizer_ = config;
  index.built_at_ = built_at.empty() ? utc_timestamp_now() : std::move(built_at);
  index.doc_ids_.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    index.doc_ids_.push_back(corpus[order[i]].id);
    const auto doc = static_cast<std::uint32_t>(i);
    for (std::size_t pos = 0; pos < tokens[i].size(); ++pos) {
      auto& list = index.postings_[tokens[i][pos]];
      if (list.empty() || list.back().doc != doc) list.push_back(Posting{doc, {}});
      list.back().positions.push_back(static_cast<std::uint32_t>(pos));
    }
  }
  return index;
}

const PostingList* Index::find(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::uint64_t Index::count(const Query& query) const {
  query.validate();
  return evaluate(query.normalized(tokenizer_)).size();
}

std::vector<std::string> Index::matching_docs(const Query& query) const {
  query.validate();
  std::vector<std::string> ids;
  for (auto d : evaluate(query.normalized(tokenizer_))) ids.push_back(doc_ids_[d]);
  return ids;
}

std::vector<std::uint32_t> Index::evaluate(const Query& q) const {
  switch (q.kind()) {
    case Query::Kind::term:
      return docs_of(find(q.text()));
    case Query::Kind::phrase:
      return evaluate_phrase(q.terms());
    case Query::Kind::conjunction: {
      DocList acc = evaluate(q.children().front());
      for (std::size_t i = 1; i < q.children().size() && !acc.empty(); ++i) acc = intersect(acc, evaluate(q.children()[i]));
      return acc;
    }
    case Query::Kind::and_not:
      return subtract(evaluate(q.children()[0]), evaluate(q.children()[1]));
    case Query::Kind::excluding: {
      DocList acc = evaluate(q.children().front());
      for (const auto& t : q.terms()) acc = subtract(acc, docs_of(find(t)));
      return acc;
    }
  }
  return {};
}

std::vector<std::uint32_t> Index::evaluate_phrase(const std::vector<std::string>& terms) const {
  std::vector<const PostingList*> lists;
  for (const auto& t : terms) {
    const auto* list = find(t);
    if (!list) return {};
    lists.push_back(list);
  }
  DocList candidates = docs_of(lists.front());
  for (std::size_t i = 1; i < lists.size(); ++i) candidates = intersect(candidates, docs_of(lists[i]));

  DocList out;
  std::vector<const std::vector<std::uint32_t>*> positions(lists.size());
  for (auto doc : candidates) {
    for (std::size_t i = 0; i < lists.size(); ++i) positions[i] = &posting_for(*lists[i], doc)->positions;
    for (auto start : *positions[0]) {
      bool matched = true;
      for (std::size_t i = 1; i < positions.size() && matched; ++i) {
        matched = std::binary_search(positions[i]->begin(), positions[i]->end(), start + static_cast<std::uint32_t>(i));
      }
      if (matched) {
        out.push_back(doc);
        break;
      }
    }
  }
  return out;
}

void Index::check_invariants() const {
  if (!std::is_sorted(doc_ids_.begin(), doc_ids_.end()) ||
      std::adjacent_find(doc_ids_.begin(), doc_ids_.end()) != doc_ids_.end()) {
    throw CorruptFileError("index document ids are not strictly ordered");
  }
  for (const auto& [term, list] : postings_) {
    if (list.empty() || list.size() > doc_ids_.size()) throw CorruptFileError("bad posting list for '" + term + "'");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& p = list[i];
      if (p.doc >= doc_ids_.size() || (i > 0 && list[i - 1].doc >= p.doc)) {
        throw CorruptFileError("posting list for '" + term + "' is not ordered by document");
      }
      if (p.positions.empty() || std::adjacent_find(p.positions.begin(), p.positions.end(),
                                                    std::greater_equal<>()) != p.positions.end()) {
        throw CorruptFileError("positions for '" + term + "' are not strictly increasing");
      }
    }
  }
}

// Layout: magic[8] | u32 version | u64 payload size | u32 crc32(payload) | payload.
namespace {
constexpr char kIndexMagic[8] = {'W', 'W', 'W', 'S', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kIndexVersion = 1;
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 4;
}  // namespace

void Index::save(const std::filesystem::path& path) const {
  ByteWriter payload;
  payload.u8(tokenizer_.case_folding ? 1 : 0);
  payload.u32(static_cast<std::uint32_t>(tokenizer_.stop_words.size()));
  for (const auto& w : tokenizer_.stop_words) payload.str(w);
  payload.str(built_at_);
  payload.u32(static_cast<std::uint32_t>(doc_ids_.size()));
  for (const auto& id : doc_ids_) payload.str(id);
  payload.u32(static_cast<std::uint32_t>(postings_.size()));
  for (const auto& [term, list] : postings_) {
    payload.str(term);
    payload.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      payload.u32(p.doc);
      payload.u32(static_cast<std::uint32_t>(p.positions.size()));
      for (auto pos : p.positions) payload.u32(pos);
    }
  }

  const auto& body = payload.bytes();
  ByteWriter out;
  out.raw(kIndexMagic, sizeof kIndexMagic);
  out.u32(kIndexVersion);
  out.u64(body.size());
  out.u32(static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
  out.raw(body.data(), body.size());
  write_file_atomically(path, out.bytes());
}

Index Index::load(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() < kHeaderSize) throw CorruptFileError("index file truncated: " + path.string());
  ByteReader header(std::string_view(data).substr(0, kHeaderSize));
  if (header.raw(sizeof kIndexMagic) != std::string_view(kIndexMagic, sizeof kIndexMagic)) {
    throw CorruptFileError("not an index file (bad magic): " + path.string());
  }
  const auto version = header.u32();
  if (version != kIndexVersion) {
    throw FormatVersionError("index format version " + std::to_string(version) + " is not supported (expected " +
                             std::to_string(kIndexVersion) + ")");
  }
  const auto size = header.u64();
  const auto crc = header.u32();
  if (data.size() - kHeaderSize != size) throw CorruptFileError("index file truncated or padded: " + path.string());
  std::string_view body = std::string_view(data).substr(kHeaderSize);
  if (crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())) != crc) {
    throw CorruptFileError("index checksum mismatch: " + path.string());
  }

  ByteReader in(body);
  Index index;
  index.tokenizer_.case_folding = in.u8() != 0;
  for (auto n = in.u32(); n > 0; --n) index.tokenizer_.stop_words.insert(in.str());
  index.built_at_ = in.str();
  for (auto n = in.u32(); n > 0; --n) index.doc_ids_.push_back(in.str());
  for (auto n = in.u32(); n > 0; --n) {
    std::string term = in.str();
    PostingList list(in.u32());
    for (auto& p : list) {
      p.doc = in.u32();
      p.positions.resize(in.u32());
      for (auto& pos : p.positions) pos = in.u32();
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  if (!in.at_end()) throw CorruptFileError("trailing bytes in index payload");
  index.check_invariants();
  return index;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("text") ||
        !j["text"].is_string()) {
      throw ParseError("corpus record needs string fields 'id' and 'text'", line_no);
    }
    Document doc{j["id"].get<std::string>(), j["text"].get<std::string>(), {}};
    if (j.contains("meta")) {
      if (!j["meta"].is_object()) throw ParseError("'meta' must be an object", line_no);
      for (const auto& [k, v] : j["meta"].items()) doc.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (is_blank(doc.text)) throw ParseError("document '" + doc.id + "' has empty text", line_no);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace wwwstory
