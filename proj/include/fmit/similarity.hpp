#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fmit {

namespace detail {

/// Decodes UTF-8 into code points so that accented feature names are compared
/// per character. Invalid bytes map to distinct surrogate-range values.
inline std::u32string decodeUtf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto lead = static_cast<unsigned char>(s[i]);
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
    bool ok = len != 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto cont = static_cast<unsigned char>(s[i + k]);
      if ((cont & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!ok) {
      out.push_back(0xDC00 + lead);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

inline double jaro(const std::u32string& a, const std::u32string& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;

  const std::size_t longest = std::max(a.size(), b.size());
  const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;

  std::vector<bool> matchedA(a.size(), false);
  std::vector<bool> matchedB(b.size(), false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (matchedB[j] || a[i] != b[j]) continue;
      matchedA[i] = matchedB[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  std::size_t outOfOrder = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!matchedA[i]) continue;
    while (!matchedB[j]) ++j;
    if (a[i] != b[j]) ++outOfOrder;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(outOfOrder) / 2.0;
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

}  // namespace detail

inline constexpr double kWinklerPrefixScale = 0.1;
inline constexpr std::size_t kWinklerMaxPrefix = 4;

/// Jaro similarity in [0,1]: 1 for identical strings, 0 when no character
/// matches inside the window floor(max(|s1|,|s2|)/2) - 1.
inline double jaro(std::string_view s1, std::string_view s2) {
  return detail::jaro(detail::decodeUtf8(s1), detail::decodeUtf8(s2));
}

/// Jaro similarity boosted by the common prefix (capped at four characters).
inline double jaroWinkler(std::string_view s1, std::string_view s2) {
  const auto a = detail::decodeUtf8(s1);
  const auto b = detail::decodeUtf8(s2);
  const double dj = detail::jaro(a, b);
  std::size_t prefix = 0;
  const std::size_t cap = std::min({a.size(), b.size(), kWinklerMaxPrefix});
  while (prefix < cap && a[prefix] == b[prefix]) ++prefix;
  const double jw = dj + static_cast<double>(prefix) * kWinklerPrefixScale * (1.0 - dj);
  return std::clamp(jw, 0.0, 1.0);
}

}  // namespace fmit
