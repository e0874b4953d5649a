#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textscape/ingest.hpp"
#include "unicode_tables.hpp"

namespace textscape {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

struct CodePoint {
  char32_t value;
  std::string_view bytes;
};

// Invalid sequences decode to kInvalid and keep their original byte.
std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!ok) {
      out.push_back({kInvalid, text.substr(i, 1)});
      ++i;
      continue;
    }
    out.push_back({cp, text.substr(i, len)});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_punctuation(char32_t cp) {
  const auto& table = detail::kPunctuationRanges;
  auto it = std::upper_bound(table.begin(), table.end(), cp,
                             [](char32_t v, const detail::CodeRange& r) { return v < r.first; });
  if (it == table.begin()) return false;
  --it;
  return cp <= it->last;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  const auto& table = detail::kLowercaseMappings;
  auto it = std::lower_bound(table.begin(), table.end(), cp,
                             [](const detail::CaseMapping& m, char32_t v) { return m.upper < v; });
  return (it != table.end() && it->upper == cp) ? it->lower : cp;
}

}  // namespace

std::optional<std::string> normalize_word(std::string_view token) {
  const auto cps = decode_utf8(token);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && cps[begin].value != kInvalid && is_punctuation(cps[begin].value)) ++begin;
  while (end > begin && cps[end - 1].value != kInvalid && is_punctuation(cps[end - 1].value)) --end;
  if (begin == end) return std::nullopt;

  std::string out;
  out.reserve(token.size());
  for (std::size_t i = begin; i < end; ++i) {
    if (cps[i].value == kInvalid) {
      out.append(cps[i].bytes);
    } else {
      append_utf8(out, to_lower(cps[i].value));
    }
  }
  return out;
}

}  // namespace textscape
