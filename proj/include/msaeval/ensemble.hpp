#pragma once

// Disagreement-aware aggregation of several models' votes.
//
// Policy, per instance and then globally:
//   1. unanimous votes are kept as they are (basis Unanimous);
//   2. split votes take the plurality label, ties broken by a fixed order
//      (default: To some extent, No, Yes) (basis Plurality);
//   3. with T = round(reference[ToSomeExtent] * N), while fewer than T
//      instances are labelled "To some extent", the split instance with the
//      most "To some extent" votes (then smallest id) is relabelled
//      (basis QuotaFlip). Instances with no such vote are never flipped, and
//      labels are never flipped away from "To some extent".

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "msaeval/distribution.hpp"
#include "msaeval/error.hpp"
#include "msaeval/io.hpp"
#include "msaeval/label.hpp"
#include "msaeval/metrics.hpp"

namespace msaeval {

using VoteCounts = std::array<std::size_t, 3>;  // indexed by index_of(Label)

inline constexpr std::array<Label, 3> kDefaultTieOrder{Label::ToSomeExtent, Label::No, Label::Yes};

struct PredictionMatrix {
  std::vector<std::string> instance_ids;
  std::vector<std::vector<Label>> votes;  // votes[i] holds one label per model

  std::size_t instances() const { return instance_ids.size(); }
  std::size_t models() const { return votes.empty() ? 0 : votes.front().size(); }

  // Throws ShapeError on ragged or empty vote lists, DuplicateKeyError on
  // repeated ids.
  void validate() const {
    if (votes.size() != instance_ids.size())
      throw ShapeError("prediction matrix has " + std::to_string(instance_ids.size()) + " ids but " +
                       std::to_string(votes.size()) + " vote lists");
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      if (votes[i].empty()) throw ShapeError("instance \"" + instance_ids[i] + "\" has no votes");
      if (votes[i].size() != votes.front().size())
        throw ShapeError("instance \"" + instance_ids[i] + "\" has " + std::to_string(votes[i].size()) +
                         " votes, expected " + std::to_string(votes.front().size()));
      if (!seen.insert(instance_ids[i]).second)
        throw DuplicateKeyError("duplicate instance id \"" + instance_ids[i] + "\"");
    }
  }
};

enum class DecisionBasis { Unanimous, Plurality, QuotaFlip };

inline std::string_view to_string(DecisionBasis b) {
  switch (b) {
    case DecisionBasis::Unanimous: return "unanimous";
    case DecisionBasis::Plurality: return "plurality";
    case DecisionBasis::QuotaFlip: return "quota_flip";
  }
  return "?";
}

struct EnsembleDecision {
  std::string instance_id;
  Label final_label = Label::Yes;
  DecisionBasis basis = DecisionBasis::Plurality;
  VoteCounts counts{};

  bool operator==(const EnsembleDecision&) const = default;
};

inline VoteCounts count_votes(std::span<const Label> votes) {
  VoteCounts c{};
  for (Label l : votes) ++c[index_of(l)];
  return c;
}

inline std::vector<VoteCounts> tally(const PredictionMatrix& matrix) {
  matrix.validate();
  std::vector<VoteCounts> out;
  out.reserve(matrix.instances());
  for (const auto& v : matrix.votes) out.push_back(count_votes(v));
  return out;
}

inline Label plurality(const VoteCounts& counts, std::span<const Label> tie_order = kDefaultTieOrder) {
  Label best = tie_order.front();
  std::size_t best_count = 0;
  bool found = false;
  for (Label l : tie_order) {
    std::size_t c = counts[index_of(l)];
    if (!found || c > best_count) {
      best = l;
      best_count = c;
      found = true;
    }
  }
  return best;
}

inline bool is_unanimous(const VoteCounts& counts) {
  std::size_t total = counts[0] + counts[1] + counts[2];
  return std::any_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == total; });
}

// Steps 1 and 2 only: unanimous labels kept, everything else by plurality.
inline std::vector<EnsembleDecision> plurality_decisions(const PredictionMatrix& matrix,
                                                         std::span<const Label> tie_order = kDefaultTieOrder) {
  if (matrix.instances() == 0) throw EmptyInputError("prediction matrix has no instances");
  auto counts = tally(matrix);
  std::vector<EnsembleDecision> out;
  out.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    EnsembleDecision d;
    d.instance_id = matrix.instance_ids[i];
    d.counts = counts[i];
    d.final_label = plurality(counts[i], tie_order);
    d.basis = is_unanimous(counts[i]) ? DecisionBasis::Unanimous : DecisionBasis::Plurality;
    out.push_back(std::move(d));
  }
  return out;
}

// Quota target: round-half-away-from-zero of freq * N.
inline std::size_t tse_quota(const LabelDistribution& reference, std::size_t n) {
  return static_cast<std::size_t>(std::round(reference[Label::ToSomeExtent] * static_cast<double>(n)));
}

inline std::vector<EnsembleDecision> aggregate(const PredictionMatrix& matrix, const LabelDistribution& reference) {
  auto decisions = plurality_decisions(matrix);
  const std::size_t quota = tse_quota(reference, decisions.size());
  const std::size_t tse = index_of(Label::ToSomeExtent);

  std::size_t current = 0;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const auto& d = decisions[i];
    if (d.final_label == Label::ToSomeExtent) {
      ++current;
    } else if (d.basis != DecisionBasis::Unanimous && d.counts[tse] > 0) {
      candidates.push_back(i);
    }
  }
  if (current >= quota) return decisions;

  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (decisions[a].counts[tse] != decisions[b].counts[tse]) return decisions[a].counts[tse] > decisions[b].counts[tse];
    return decisions[a].instance_id < decisions[b].instance_id;
  });
  for (std::size_t idx : candidates) {
    if (current >= quota) break;
    decisions[idx].final_label = Label::ToSomeExtent;
    decisions[idx].basis = DecisionBasis::QuotaFlip;
    ++current;
  }
  return decisions;
}

inline std::vector<Label> final_labels(std::span<const EnsembleDecision> decisions) {
  std::vector<Label> out;
  out.reserve(decisions.size());
  for (const auto& d : decisions) out.push_back(d.final_label);
  return out;
}

inline LabelDistribution output_distribution(std::span<const EnsembleDecision> decisions) {
  if (decisions.empty()) throw EmptyInputError("no ensemble decisions");
  return LabelDistribution::measure(final_labels(decisions));
}

// ---------------------------------------------------------------------------
// File formats.

// Joins M single-model label files on id. Instance order follows the first
// file; every file must carry the same id set.
inline PredictionMatrix matrix_from_runs(std::span<const std::vector<LabelEntry>> runs) {
  if (runs.empty()) throw EmptyInputError("no prediction runs given");
  PredictionMatrix m;
  for (const auto& e : runs.front()) m.instance_ids.push_back(e.id);
  m.votes.assign(m.instance_ids.size(), {});
  std::unordered_map<std::string_view, std::size_t> row;
  for (std::size_t i = 0; i < m.instance_ids.size(); ++i) {
    if (!row.emplace(m.instance_ids[i], i).second)
      throw DuplicateKeyError("duplicate id \"" + m.instance_ids[i] + "\" in run 1");
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<std::string> extra;
    for (const auto& e : runs[r]) {
      auto it = row.find(e.id);
      if (it == row.end()) {
        extra.push_back(e.id);
        continue;
      }
      if (m.votes[it->second].size() != r)
        throw DuplicateKeyError("duplicate id \"" + e.id + "\" in run " + std::to_string(r + 1));
      m.votes[it->second].push_back(e.label);
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < m.instance_ids.size(); ++i) {
      if (m.votes[i].size() != r + 1) missing.push_back(m.instance_ids[i]);
    }
    if (!extra.empty() || !missing.empty()) {
      std::string msg = "run " + std::to_string(r + 1) + " id set differs from run 1";
      if (!missing.empty()) msg += "; missing: " + detail::list_ids(missing);
      if (!extra.empty()) msg += "; unexpected: " + detail::list_ids(extra);
      throw JoinError(msg);
    }
  }
  m.validate();
  return m;
}

// Combined vote file: {"id": "...", "votes": ["Yes", "No", ...]} per line.
inline PredictionMatrix parse_votes_jsonl(std::string_view document) {
  PredictionMatrix m;
  for_each_jsonl(document, [&](std::size_t line, const nlohmann::json& obj) {
    const std::string where = "line " + std::to_string(line);
    std::string id = required_string(obj, "id", where);
    auto v = obj.find("votes");
    if (v == obj.end()) throw SchemaError(where + ": missing required field \"votes\"");
    if (!v->is_array()) throw SchemaError(where + ": field \"votes\" must be an array");
    std::vector<Label> votes;
    for (const auto& item : *v) {
      if (!item.is_string()) throw SchemaError(where + ": votes must be label strings");
      try {
        votes.push_back(parse_label(item.get<std::string>()));
      } catch (const LabelParseError& e) {
        throw LabelParseError(where + ": " + e.what());
      }
    }
    m.instance_ids.push_back(std::move(id));
    m.votes.push_back(std::move(votes));
  });
  m.validate();
  return m;
}

inline std::string to_votes_jsonl(const PredictionMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.instances(); ++i) {
    nlohmann::ordered_json obj;
    obj["id"] = m.instance_ids[i];
    nlohmann::ordered_json votes = nlohmann::ordered_json::array();
    for (Label l : m.votes[i]) votes.push_back(std::string(to_string(l)));
    obj["votes"] = std::move(votes);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<LabelEntry> to_label_entries(std::span<const EnsembleDecision> decisions) {
  std::vector<LabelEntry> out;
  out.reserve(decisions.size());
  for (const auto& d : decisions) out.push_back({d.instance_id, d.final_label});
  return out;
}

// {"id", "final", "basis", "counts": {"Yes": n, "To some extent": n, "No": n}}
inline std::string to_audit_jsonl(std::span<const EnsembleDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    nlohmann::ordered_json obj;
    obj["id"] = d.instance_id;
    obj["final"] = std::string(to_string(d.final_label));
    obj["basis"] = std::string(to_string(d.basis));
    nlohmann::ordered_json counts;
    for (Label l : kStrictClasses) counts[std::string(to_string(l))] = d.counts[index_of(l)];
    obj["counts"] = std::move(counts);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace msaeval
