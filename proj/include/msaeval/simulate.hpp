#pragma once

// Synthetic ensembles: gold labels drawn from a class distribution, and each
// model's vote drawn from a confusion row conditioned on the gold label.
// Output is a pure function of the profile (see Xoshiro256 for the stream).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "msaeval/distribution.hpp"
#include "msaeval/ensemble.hpp"
#include "msaeval/error.hpp"
#include "msaeval/metrics.hpp"
#include "msaeval/rng.hpp"

namespace msaeval {

struct SimProfile {
  std::size_t n_instances = 100;
  std::size_t n_models = 5;
  LabelDistribution gold;
  std::array<LabelDistribution, 3> confusion;  // row per gold label, indexed by index_of
  std::uint64_t seed = 0;

  void validate() const {
    if (n_instances == 0) throw ValidationError("simulation needs at least one instance");
    if (n_models == 0) throw ValidationError("simulation needs at least one model");
  }
};

struct SimOutput {
  std::vector<LabelEntry> gold;
  PredictionMatrix predictions;
};

inline Label sample_label(const LabelDistribution& dist, Xoshiro256& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (Label l : kStrictClasses) {
    acc += dist[l];
    if (u < acc) return l;
  }
  // u landed in the rounding slack above the cumulative sum; take the last
  // label with non-zero mass.
  for (auto it = kStrictClasses.rbegin(); it != kStrictClasses.rend(); ++it) {
    if (dist[*it] > 0.0) return *it;
  }
  return Label::Yes;
}

inline std::string sim_instance_id(std::size_t i, std::size_t n) {
  std::string digits = std::to_string(i);
  std::size_t width = std::to_string(n == 0 ? 0 : n - 1).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "sim-" + digits;
}

inline SimOutput simulate(const SimProfile& profile) {
  profile.validate();
  Xoshiro256 rng(profile.seed);
  SimOutput out;
  out.gold.reserve(profile.n_instances);
  out.predictions.instance_ids.reserve(profile.n_instances);
  out.predictions.votes.reserve(profile.n_instances);
  for (std::size_t i = 0; i < profile.n_instances; ++i) {
    std::string id = sim_instance_id(i, profile.n_instances);
    Label g = sample_label(profile.gold, rng);
    std::vector<Label> votes;
    votes.reserve(profile.n_models);
    for (std::size_t m = 0; m < profile.n_models; ++m) votes.push_back(sample_label(profile.confusion[index_of(g)], rng));
    out.gold.push_back({id, g});
    out.predictions.instance_ids.push_back(std::move(id));
    out.predictions.votes.push_back(std::move(votes));
  }
  return out;
}

// One simulated ensemble scored two ways: plain plurality, and the
// calibrated aggregation using the profile's gold distribution as reference.
struct CalibrationTrial {
  double gold_tse = 0.0;
  double plurality_tse = 0.0;
  double calibrated_tse = 0.0;
  double plurality_macro_f1 = 0.0;
  double calibrated_macro_f1 = 0.0;
};

inline CalibrationTrial run_calibration_trial(const SimProfile& profile) {
  auto sim = simulate(profile);
  auto base = plurality_decisions(sim.predictions);
  auto calibrated = aggregate(sim.predictions, profile.gold);
  auto strict_f1 = [&](const std::vector<EnsembleDecision>& d) {
    std::vector<LabeledPair> pairs;
    pairs.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) pairs.push_back({d[i].instance_id, sim.gold[i].label, d[i].final_label});
    return score(pairs, ScoreMode::Strict).macro_f1;
  };
  std::vector<Label> gold_labels;
  for (const auto& g : sim.gold) gold_labels.push_back(g.label);
  CalibrationTrial t;
  t.gold_tse = LabelDistribution::measure(gold_labels)[Label::ToSomeExtent];
  t.plurality_tse = output_distribution(base)[Label::ToSomeExtent];
  t.calibrated_tse = output_distribution(calibrated)[Label::ToSomeExtent];
  t.plurality_macro_f1 = strict_f1(base);
  t.calibrated_macro_f1 = strict_f1(calibrated);
  return t;
}

namespace detail {

inline LabelDistribution distribution_from_json(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object of label frequencies");
  std::array<double, 3> f{};
  for (const auto& [key, value] : obj.items()) {
    auto label = try_parse_label(key);
    if (!label) throw ValidationError(where + ": unknown label \"" + key + "\"");
    if (!value.is_number()) throw ValidationError(where + ": frequency for \"" + key + "\" must be a number");
    f[index_of(*label)] = value.get<double>();
  }
  try {
    return LabelDistribution(f[0], f[1], f[2]);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace detail

// Profile file:
//   {"gold": {"Yes": 0.55, "To some extent": 0.18, "No": 0.27},
//    "confusion": {"Yes": {...}, "To some extent": {...}, "No": {...}},
//    "n_instances": 100, "n_models": 5, "seed": 1}      (last three optional)
inline SimProfile parse_profile(std::string_view document) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("profile: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("profile: expected a JSON object");
  SimProfile p;
  if (!root.contains("gold")) throw ValidationError("profile: missing \"gold\"");
  if (!root.contains("confusion")) throw ValidationError("profile: missing \"confusion\"");
  p.gold = detail::distribution_from_json(root["gold"], "profile.gold");
  const auto& conf = root["confusion"];
  if (!conf.is_object()) throw ValidationError("profile.confusion: expected an object");
  for (Label l : kStrictClasses) {
    auto it = conf.find(std::string(to_string(l)));
    if (it == conf.end()) throw ValidationError("profile.confusion: missing row \"" + std::string(to_string(l)) + "\"");
    p.confusion[index_of(l)] = detail::distribution_from_json(*it, "profile.confusion[\"" + std::string(to_string(l)) + "\"]");
  }
  auto count = [&](const char* key, auto& field) {
    if (auto it = root.find(key); it != root.end()) {
      if (!it->is_number_unsigned()) throw ValidationError(std::string("profile.") + key + ": expected a non-negative integer");
      field = it->template get<std::remove_reference_t<decltype(field)>>();
    }
  };
  count("n_instances", p.n_instances);
  count("n_models", p.n_models);
  count("seed", p.seed);
  return p;
}

}  // namespace msaeval
