#pragma once

#include <string>

namespace wwwstory {

/// Which conjuncts a conjunction overextends.
enum class FallacyClass { none, single_wrt_a, single_wrt_b, double_fallacy };

inline FallacyClass classify_fallacy(bool wrt_a, bool wrt_b) {
  if (wrt_a && wrt_b) return FallacyClass::double_fallacy;
  if (wrt_a) return FallacyClass::single_wrt_a;
  if (wrt_b) return FallacyClass::single_wrt_b;
  return FallacyClass::none;
}

inline std::string to_string(FallacyClass c) {
  switch (c) {
    case FallacyClass::none:
      return "none";
    case FallacyClass::single_wrt_a:
      return "single_wrt_a";
    case FallacyClass::single_wrt_b:
      return "single_wrt_b";
    case FallacyClass::double_fallacy:
      return "double";
  }
  return "?";
}

}  // namespace wwwstory
