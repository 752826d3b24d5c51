#include "wwwstory/tokenizer.hpp"

#include "wwwstory/errors.hpp"

namespace wwwstory {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char fold(char c, bool folding) {
  if (folding && c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return c;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (is_token_byte(static_cast<unsigned char>(ch))) {
      current.push_back(fold(ch, config.case_folding));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string normalize_term(std::string_view term, const TokenizerConfig& config) {
  auto tokens = tokenize(term, config);
  if (tokens.size() != 1) {
    throw StructuralQueryError("term '" + std::string(term) + "' must be exactly one token, got " +
                               std::to_string(tokens.size()));
  }
  return std::move(tokens.front());
}

}  // namespace wwwstory
