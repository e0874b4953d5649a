#pragma once

#include <array>
#include <cstdint>

namespace textscape::detail {

struct CodeRange {
  char32_t first;
  char32_t last;
};

struct CaseMapping {
  char32_t upper;
  char32_t lower;
};

// General category P* (Pc, Pd, Pe, Pf, Pi, Po, Ps), sorted and disjoint.
extern const std::array<CodeRange, 185> kPunctuationRanges;

// Simple lowercase mapping, sorted by source code point.
extern const std::array<CaseMapping, 1393> kLowercaseMappings;

}  // namespace textscape::detail
