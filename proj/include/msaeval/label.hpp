#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "msaeval/error.hpp"

namespace msaeval {

// Three-way judgement attached to a tutor response.
enum class Label { Yes = 0, ToSomeExtent = 1, No = 2 };

// Binary view used by lenient scoring: Yes and "To some extent" collapse.
enum class LenientLabel { Positive = 0, No = 1 };

inline constexpr std::array<Label, 3> kStrictClasses{Label::Yes, Label::ToSomeExtent, Label::No};
inline constexpr std::array<LenientLabel, 2> kLenientClasses{LenientLabel::Positive, LenientLabel::No};

inline constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::Yes: return "Yes";
    case Label::ToSomeExtent: return "To some extent";
    case Label::No: return "No";
  }
  return "?";
}

inline std::string_view to_string(LenientLabel l) {
  return l == LenientLabel::Positive ? "Positive" : "No";
}

// Lower-case identifier used for keys in flat key-value output.
inline std::string_view slug(Label l) {
  switch (l) {
    case Label::Yes: return "yes";
    case Label::ToSomeExtent: return "to_some_extent";
    case Label::No: return "no";
  }
  return "?";
}

inline std::string_view slug(LenientLabel l) {
  return l == LenientLabel::Positive ? "positive" : "no";
}

inline std::optional<Label> try_parse_label(std::string_view s) {
  if (s == "Yes") return Label::Yes;
  if (s == "To some extent") return Label::ToSomeExtent;
  if (s == "No") return Label::No;
  return std::nullopt;
}

// Case-sensitive; only the three canonical strings are accepted.
inline Label parse_label(std::string_view s) {
  if (auto l = try_parse_label(s)) return *l;
  throw LabelParseError("invalid label \"" + std::string(s) +
                        "\" (expected \"Yes\", \"To some extent\" or \"No\")");
}

inline constexpr LenientLabel to_lenient(Label l) {
  return l == Label::No ? LenientLabel::No : LenientLabel::Positive;
}

}  // namespace msaeval
