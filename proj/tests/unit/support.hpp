#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "wwwstory/index.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(WWWSTORY_FIXTURE_DIR) / name;
}

inline std::vector<wwwstory::Document> toy10() { return wwwstory::read_corpus(fixture("toy10.jsonl")); }

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "wwwstory_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Random corpus over a small vocabulary so co-occurrences and phrases are common.
inline std::vector<wwwstory::Document> random_corpus(std::mt19937_64& rng, int docs, int vocab, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len), word(0, vocab - 1);
  std::vector<wwwstory::Document> out;
  for (int d = 0; d < docs; ++d) {
    std::string text;
    int n = len(rng);
    for (int i = 0; i < n; ++i) text += "w" + std::to_string(word(rng)) + " ";
    out.push_back({"doc" + std::to_string(d), text, {}});
  }
  return out;
}

}  // namespace testing_support
