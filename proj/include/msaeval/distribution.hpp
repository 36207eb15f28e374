#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <string_view>

#include "msaeval/error.hpp"
#include "msaeval/label.hpp"

namespace msaeval {

// Class frequencies over {Yes, To some extent, No}.
class LabelDistribution {
 public:
  static constexpr double kTolerance = 1e-9;

  LabelDistribution() = default;

  // Throws ValidationError unless entries are finite, non-negative and sum to 1.
  LabelDistribution(double yes, double to_some_extent, double no) : freq_{yes, to_some_extent, no} { validate(); }

  static LabelDistribution from_counts(const std::array<std::size_t, 3>& counts) {
    std::size_t total = counts[0] + counts[1] + counts[2];
    if (total == 0) throw EmptyInputError("cannot form a distribution from zero labels");
    auto n = static_cast<double>(total);
    return LabelDistribution(static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n,
                             static_cast<double>(counts[2]) / n);
  }

  static LabelDistribution measure(std::span<const Label> labels) {
    std::array<std::size_t, 3> counts{};
    for (Label l : labels) ++counts[index_of(l)];
    return from_counts(counts);
  }

  // Only the "To some extent" share matters for quota calibration; the rest
  // of the mass is assigned to Yes.
  static LabelDistribution with_tse(double tse) {
    if (!std::isfinite(tse) || tse < 0.0 || tse > 1.0)
      throw ValidationError("To some extent frequency must lie in [0, 1], got " + std::to_string(tse));
    return LabelDistribution(1.0 - tse, tse, 0.0);
  }

  double operator[](Label l) const { return freq_[index_of(l)]; }
  const std::array<double, 3>& values() const { return freq_; }

  bool operator==(const LabelDistribution&) const = default;

 private:
  void validate() const {
    double sum = 0.0;
    for (double f : freq_) {
      if (!std::isfinite(f) || f < 0.0) throw ValidationError("label frequencies must be finite and non-negative");
      sum += f;
    }
    if (std::abs(sum - 1.0) > kTolerance)
      throw ValidationError("label frequencies must sum to 1 (got " + std::to_string(sum) + ")");
  }

  std::array<double, 3> freq_{1.0, 0.0, 0.0};
};

// Parses "0.25", "1/4" or "25%".
inline double parse_fraction(std::string_view text) {
  auto to_double = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ValidationError("not a number: \"" + std::string(text) + "\"");
    return v;
  };
  if (!text.empty() && text.back() == '%') return to_double(text.substr(0, text.size() - 1)) / 100.0;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    double num = to_double(text.substr(0, slash));
    double den = to_double(text.substr(slash + 1));
    if (den == 0.0) throw ValidationError("zero denominator in \"" + std::string(text) + "\"");
    return num / den;
  }
  return to_double(text);
}

}  // namespace msaeval
