#pragma once

// Fine-tuning hyperparameters plus the two schedule-side numerics that act
// on them: linear learning-rate warmup and global gradient-norm clipping.
//
// Config files are flat "key = value" lines; '#' starts a comment. Keys not
// present keep their defaults, unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "msaeval/error.hpp"

namespace msaeval {

struct TrainConfig {
  std::int64_t rank = 64;
  double alpha = 2.0;
  double dropout = 0.0;
  double learning_rate = 4e-5;
  double warmup_fraction = 0.10;
  double weight_decay = 0.05;
  std::int64_t max_steps = 500;
  double clip_norm = 1.0;
  std::int64_t max_seq_len = 2048;
  std::int64_t batch_size = 2;
  std::int64_t seed = 42;
  std::int64_t eval_every = 50;
  std::int64_t checkpoint_every = 100;
  std::int64_t checkpoint_retention = 3;

  bool operator==(const TrainConfig&) const = default;

  void validate() const {
    auto positive = [](const char* name, double v) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
    };
    positive("rank", static_cast<double>(rank));
    positive("alpha", alpha);
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must lie in [0, 1)");
    positive("learning_rate", learning_rate);
    if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) throw ValidationError("warmup_fraction must lie in (0, 1)");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ValidationError("weight_decay must be >= 0");
    positive("max_steps", static_cast<double>(max_steps));
    positive("clip_norm", clip_norm);
    positive("max_seq_len", static_cast<double>(max_seq_len));
    positive("batch_size", static_cast<double>(batch_size));
    if (seed < 0) throw ValidationError("seed must be non-negative");
    positive("eval_every", static_cast<double>(eval_every));
    positive("checkpoint_every", static_cast<double>(checkpoint_every));
    positive("checkpoint_retention", static_cast<double>(checkpoint_retention));
  }

  // ceil(warmup_fraction * max_steps); products within 1e-9 of an integer
  // are treated as that integer so 0.1 * 500 gives 50, not 51.
  std::int64_t warmup_steps() const {
    double raw = warmup_fraction * static_cast<double>(max_steps);
    double nearest = std::round(raw);
    double w = std::abs(raw - nearest) < 1e-9 ? nearest : std::ceil(raw);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(w));
  }
};

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ValidationError("config key \"" + std::string(key) + "\": cannot parse \"" + std::string(text) + "\"");
  return v;
}

}  // namespace detail

inline std::string to_config_text(const TrainConfig& c) {
  using detail::shortest;
  std::string out;
  auto line = [&](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("rank", std::to_string(c.rank));
  line("alpha", shortest(c.alpha));
  line("dropout", shortest(c.dropout));
  line("learning_rate", shortest(c.learning_rate));
  line("warmup_fraction", shortest(c.warmup_fraction));
  line("weight_decay", shortest(c.weight_decay));
  line("max_steps", std::to_string(c.max_steps));
  line("clip_norm", shortest(c.clip_norm));
  line("max_seq_len", std::to_string(c.max_seq_len));
  line("batch_size", std::to_string(c.batch_size));
  line("seed", std::to_string(c.seed));
  line("eval_every", std::to_string(c.eval_every));
  line("checkpoint_every", std::to_string(c.checkpoint_every));
  line("checkpoint_retention", std::to_string(c.checkpoint_retention));
  return out;
}

inline TrainConfig parse_config_text(std::string_view text) {
  TrainConfig c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string_view key = detail::trim(line.substr(0, eq));
    std::string_view value = detail::trim(line.substr(eq + 1));
    using detail::parse_number;
    if (key == "rank") c.rank = parse_number<std::int64_t>(key, value);
    else if (key == "alpha") c.alpha = parse_number<double>(key, value);
    else if (key == "dropout") c.dropout = parse_number<double>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
    else if (key == "warmup_fraction") c.warmup_fraction = parse_number<double>(key, value);
    else if (key == "weight_decay") c.weight_decay = parse_number<double>(key, value);
    else if (key == "max_steps") c.max_steps = parse_number<std::int64_t>(key, value);
    else if (key == "clip_norm") c.clip_norm = parse_number<double>(key, value);
    else if (key == "max_seq_len") c.max_seq_len = parse_number<std::int64_t>(key, value);
    else if (key == "batch_size") c.batch_size = parse_number<std::int64_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::int64_t>(key, value);
    else if (key == "eval_every") c.eval_every = parse_number<std::int64_t>(key, value);
    else if (key == "checkpoint_every") c.checkpoint_every = parse_number<std::int64_t>(key, value);
    else if (key == "checkpoint_retention") c.checkpoint_retention = parse_number<std::int64_t>(key, value);
    else throw ValidationError("config line " + std::to_string(line_no) + ": unknown key \"" + std::string(key) + "\"");
  }
  c.validate();
  return c;
}

// Linear ramp from 0 to learning_rate over the warmup steps, then constant.
inline double warmup_lr(std::int64_t step, const TrainConfig& config) {
  if (step < 0 || step > config.max_steps)
    throw RangeError("step " + std::to_string(step) + " outside [0, " + std::to_string(config.max_steps) + "]");
  const std::int64_t w = config.warmup_steps();
  if (step >= w) return config.learning_rate;
  return config.learning_rate * static_cast<double>(step) / static_cast<double>(w);
}

inline double l2_norm(std::span<const double> g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

// Rescales g onto the clip_norm ball when it lies outside.
inline std::vector<double> clip_gradient(std::span<const double> g, double clip_norm) {
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) throw NumericError("clip_norm must be positive and finite");
  for (double v : g) {
    if (!std::isfinite(v)) throw NumericError("gradient contains non-finite entries");
  }
  std::vector<double> out(g.begin(), g.end());
  const double norm = l2_norm(g);
  if (norm <= clip_norm) return out;
  const double scale = clip_norm / norm;
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace msaeval
