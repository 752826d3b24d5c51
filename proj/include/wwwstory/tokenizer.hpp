#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wwwstory {

/// Tokens are maximal runs of ASCII letters/digits or non-ASCII (UTF-8) bytes;
/// everything else separates tokens. Case folding is ASCII-only.
struct TokenizerConfig {
  bool case_folding = true;
  // Only consulted by diagnostic reports; stop words stay in the index.
  std::set<std::string> stop_words;

  bool operator==(const TokenizerConfig&) const = default;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Normalizes a single user-supplied term the same way the tokenizer would.
/// Throws StructuralQueryError unless the input is exactly one token.
std::string normalize_term(std::string_view term, const TokenizerConfig& config = {});

}  // namespace wwwstory
