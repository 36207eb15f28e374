#pragma once

// Strict (three-class) and lenient (two-class) macro-F1 and accuracy.
//
// Conventions:
//  * any ratio with a zero denominator (precision, recall, F1) is 0;
//  * the macro average runs over the whole class set, so a class that never
//    occurs in gold or predictions still contributes an F1 of 0.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "msaeval/error.hpp"
#include "msaeval/io.hpp"
#include "msaeval/label.hpp"

namespace msaeval {

template <typename L>
struct BasicLabeledPair {
  std::string instance_id;
  L gold;
  L predicted;

  bool operator==(const BasicLabeledPair&) const = default;
};

using LabeledPair = BasicLabeledPair<Label>;
using LenientPair = BasicLabeledPair<LenientLabel>;

// Counts indexed (gold, predicted) over an ordered class set.
template <typename L>
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<L> classes)
      : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {}

  const std::vector<L>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::size_t total() const { return total_; }

  std::size_t index(L label) const {
    auto it = std::find(classes_.begin(), classes_.end(), label);
    if (it == classes_.end()) {
      throw DomainError("label \"" + std::string(to_string(label)) + "\" is outside the class set");
    }
    return static_cast<std::size_t>(it - classes_.begin());
  }

  std::size_t at(L gold, L predicted) const { return cell(index(gold), index(predicted)); }
  std::size_t cell(std::size_t g, std::size_t p) const { return counts_[g * size() + p]; }

  void add(L gold, L predicted) {
    std::size_t g = index(gold);
    std::size_t p = index(predicted);
    ++counts_[g * size() + p];
    ++total_;
  }

  std::size_t true_positives(std::size_t c) const { return cell(c, c); }

  std::size_t predicted_count(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t g = 0; g < size(); ++g) s += cell(g, c);
    return s;
  }

  // Gold occurrences of class c.
  std::size_t support(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < size(); ++p) s += cell(c, p);
    return s;
  }

  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < size(); ++c) s += cell(c, c);
    return s;
  }

  double precision(std::size_t c) const { return ratio(true_positives(c), predicted_count(c)); }
  double recall(std::size_t c) const { return ratio(true_positives(c), support(c)); }

  double f1(std::size_t c) const {
    double p = precision(c);
    double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

 private:
  static double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  }

  std::vector<L> classes_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

template <typename L>
ConfusionMatrix<L> build_confusion(std::span<const BasicLabeledPair<L>> pairs, std::span<const L> class_set) {
  if (pairs.empty()) throw EmptyInputError("cannot build a confusion matrix from zero pairs");
  ConfusionMatrix<L> m(std::vector<L>(class_set.begin(), class_set.end()));
  for (const auto& p : pairs) m.add(p.gold, p.predicted);
  return m;
}

template <typename L>
double macro_f1(const ConfusionMatrix<L>& m) {
  if (m.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) sum += m.f1(c);
  return sum / static_cast<double>(m.size());
}

template <typename L>
double accuracy(const ConfusionMatrix<L>& m) {
  if (m.total() == 0) throw EmptyInputError("accuracy is undefined for zero samples");
  return static_cast<double>(m.trace()) / static_cast<double>(m.total());
}

inline std::vector<LenientPair> to_lenient(std::span<const LabeledPair> pairs) {
  std::vector<LenientPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.instance_id, to_lenient(p.gold), to_lenient(p.predicted)});
  return out;
}

enum class ScoreMode { Strict, Lenient };

struct ClassScore {
  std::string name;  // slug, e.g. "to_some_extent"
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ScoreReport {
  ScoreMode mode = ScoreMode::Strict;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::vector<ClassScore> per_class;  // in class-set order
};

namespace detail {

template <typename L>
ScoreReport report_from(const ConfusionMatrix<L>& m, ScoreMode mode) {
  ScoreReport r;
  r.mode = mode;
  r.macro_f1 = macro_f1(m);
  r.accuracy = accuracy(m);
  r.total = m.total();
  for (std::size_t c = 0; c < m.size(); ++c) {
    r.per_class.push_back({std::string(slug(m.classes()[c])), m.precision(c), m.recall(c), m.f1(c), m.support(c)});
  }
  return r;
}

}  // namespace detail

inline ScoreReport score(std::span<const LabeledPair> pairs, ScoreMode mode) {
  if (pairs.empty()) throw EmptyInputError("cannot score zero pairs");
  std::set<std::string_view> ids;
  for (const auto& p : pairs) {
    if (p.instance_id.empty()) throw ValidationError("labeled pair with empty instance_id");
    if (!ids.insert(p.instance_id).second) throw DuplicateKeyError("duplicate instance_id \"" + p.instance_id + "\"");
  }
  if (mode == ScoreMode::Strict) {
    return detail::report_from(build_confusion<Label>(pairs, kStrictClasses), mode);
  }
  auto lenient = to_lenient(pairs);
  return detail::report_from(build_confusion<LenientLabel>(lenient, kLenientClasses), mode);
}

// ---------------------------------------------------------------------------
// Label files: {"id": "...", "label": "Yes"|"To some extent"|"No"} per line.

struct LabelEntry {
  std::string id;
  Label label;

  bool operator==(const LabelEntry&) const = default;
};

inline std::vector<LabelEntry> parse_label_jsonl(std::string_view document) {
  std::vector<LabelEntry> out;
  std::set<std::string> seen;
  for_each_jsonl(document, [&](std::size_t line, const nlohmann::json& obj) {
    const std::string where = "line " + std::to_string(line);
    std::string id = required_string(obj, "id", where);
    if (id.empty()) throw SchemaError(where + ": empty id");
    Label label;
    try {
      label = parse_label(required_string(obj, "label", where));
    } catch (const LabelParseError& e) {
      throw LabelParseError(where + ": " + e.what());
    }
    if (!seen.insert(id).second) throw DuplicateKeyError(where + ": duplicate id \"" + id + "\"");
    out.push_back({std::move(id), label});
  });
  return out;
}

inline std::vector<LabelEntry> load_label_jsonl(const std::filesystem::path& path) {
  std::string text = read_file(path);
  try {
    return parse_label_jsonl(text);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline std::string to_label_jsonl(std::span<const LabelEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    nlohmann::ordered_json obj;
    obj["id"] = e.id;
    obj["label"] = std::string(to_string(e.label));
    out += obj.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string list_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i) s += ", ";
    s += ids[i];
  }
  if (ids.size() > kShown) s += ", ... (" + std::to_string(ids.size() - kShown) + " more)";
  return s;
}

}  // namespace detail

// Pairs predictions with gold labels by id, in gold order. Both sides must
// cover exactly the same id set.
inline std::vector<LabeledPair> join_labels(std::span<const LabelEntry> gold, std::span<const LabelEntry> predicted) {
  std::unordered_map<std::string_view, Label> pred_by_id;
  for (const auto& p : predicted) {
    if (!pred_by_id.emplace(p.id, p.label).second) throw DuplicateKeyError("duplicate prediction id \"" + p.id + "\"");
  }
  std::vector<LabeledPair> pairs;
  std::vector<std::string> missing_pred;
  std::set<std::string_view> gold_ids;
  for (const auto& g : gold) {
    if (!gold_ids.insert(g.id).second) throw DuplicateKeyError("duplicate gold id \"" + g.id + "\"");
    auto it = pred_by_id.find(g.id);
    if (it == pred_by_id.end()) {
      missing_pred.push_back(g.id);
      continue;
    }
    pairs.push_back({g.id, g.label, it->second});
  }
  std::vector<std::string> missing_gold;
  for (const auto& p : predicted) {
    if (!gold_ids.contains(p.id)) missing_gold.push_back(p.id);
  }
  if (!missing_pred.empty() || !missing_gold.empty()) {
    std::string msg = "gold and prediction id sets differ";
    if (!missing_pred.empty()) msg += "; missing predictions: " + detail::list_ids(missing_pred);
    if (!missing_gold.empty()) msg += "; predictions without gold: " + detail::list_ids(missing_gold);
    throw JoinError(msg);
  }
  return pairs;
}

}  // namespace msaeval
