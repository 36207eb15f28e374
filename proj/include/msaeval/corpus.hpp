#pragma once

// Dialogue corpus model and conversion into per-track instruction JSONL.
//
// Raw corpus format (one top-level JSON array):
//
//   [{ "conversation_id": "...",
//      "source": "Bridge",                                  (optional)
//      "history": [{"speaker": "student"|"tutor", "text": "..."}],
//      "tutor_responses": {
//        "<tutor_id>": { "text": "...",
//                        "annotations": {"Mistake_Identification": "Yes", ...} }  (optional)
//      } }]
//
// Instruction JSONL, one object per line, keys in this order:
//
//   {"id":"<conversation_id>|<tutor_id>","instruction":"...","input":"...","output":"Yes"}

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msaeval/error.hpp"
#include "msaeval/io.hpp"
#include "msaeval/label.hpp"
#include "msaeval/templates.hpp"
#include "msaeval/track.hpp"

namespace msaeval {

enum class Speaker { Student, Tutor };

struct Turn {
  Speaker speaker = Speaker::Student;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct TutorResponse {
  std::string tutor_id;
  std::string text;
  // Raw label strings keyed by track; validated on parse and again when a
  // record is built, since dialogues can also be assembled in code.
  std::map<Track, std::string> annotations;

  bool operator==(const TutorResponse&) const = default;
};

struct TutorDialogue {
  std::string conversation_id;
  std::optional<std::string> source;
  std::vector<Turn> history;
  std::map<std::string, TutorResponse> responses;

  bool operator==(const TutorDialogue&) const = default;
};

struct InstructionRecord {
  std::string instance_id;
  std::string instruction;
  std::string input;
  std::optional<Label> output;

  bool operator==(const InstructionRecord&) const = default;
};

inline constexpr char kIdSeparator = '|';
inline constexpr std::string_view kResponseJoiner = "\n\nTutor response to evaluate:\n";

enum class ExportMode {
  LabeledOnly,  // only responses annotated for the track; output always present
  AllPairs,     // every response; output present where annotated
};

namespace detail {

inline bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos; }

inline std::string_view speaker_name(Speaker s) { return s == Speaker::Student ? "student" : "tutor"; }

}  // namespace detail

inline std::string make_instance_id(std::string_view conversation_id, std::string_view tutor_id) {
  if (conversation_id.find(kIdSeparator) != std::string_view::npos ||
      tutor_id.find(kIdSeparator) != std::string_view::npos) {
    throw ValidationError("identifier contains reserved separator '|': \"" + std::string(conversation_id) +
                          "\" / \"" + std::string(tutor_id) + "\"");
  }
  return std::string(conversation_id) + kIdSeparator + std::string(tutor_id);
}

// Checks the single-dialogue invariants; throws ValidationError.
inline void validate_dialogue(const TutorDialogue& d) {
  const std::string where = "conversation \"" + d.conversation_id + "\"";
  if (d.conversation_id.empty()) throw ValidationError("conversation_id must be non-empty");
  if (d.conversation_id.find(kIdSeparator) != std::string::npos)
    throw ValidationError(where + ": conversation_id contains reserved separator '|'");
  if (d.history.empty()) throw ValidationError(where + ": history must contain at least one turn");
  for (std::size_t i = 0; i < d.history.size(); ++i) {
    if (detail::blank(d.history[i].text))
      throw ValidationError(where + ": history[" + std::to_string(i) + "] has empty text");
  }
  if (d.responses.empty()) throw ValidationError(where + ": tutor_responses must have at least one entry");
  for (const auto& [id, r] : d.responses) {
    if (id.empty() || id != r.tutor_id) throw ValidationError(where + ": inconsistent tutor_id \"" + id + "\"");
    if (id.find(kIdSeparator) != std::string::npos)
      throw ValidationError(where + ": tutor_id \"" + id + "\" contains reserved separator '|'");
    if (detail::blank(r.text)) throw ValidationError(where + ": response \"" + id + "\" has empty text");
    for (const auto& [track, value] : r.annotations) {
      if (!try_parse_label(value))
        throw LabelParseError(where + ", response \"" + id + "\", " + std::string(annotation_key(track)) +
                              ": invalid label \"" + value + "\"");
    }
  }
}

// Parses the raw corpus document. Annotation keys other than the four track
// keys are dropped; everything else in the schema is enforced.
inline std::vector<TutorDialogue> parse_corpus(std::string_view document) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    auto pos = position_of(document, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("corpus: line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
                     e.what());
  }
  if (!root.is_array()) throw SchemaError("corpus: top-level value must be an array of conversations");

  std::vector<TutorDialogue> out;
  out.reserve(root.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& obj = root[i];
    const std::string where = "conversation[" + std::to_string(i) + "]";
    if (!obj.is_object()) throw SchemaError(where + ": expected an object");

    TutorDialogue d;
    d.conversation_id = required_string(obj, "conversation_id", where);
    if (auto it = obj.find("source"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(where + ": field \"source\" must be a string");
      d.source = it->get<std::string>();
    }

    auto hist = obj.find("history");
    if (hist == obj.end()) throw SchemaError(where + ": missing required field \"history\"");
    if (!hist->is_array()) throw SchemaError(where + ": field \"history\" must be an array");
    for (std::size_t t = 0; t < hist->size(); ++t) {
      const json& turn = (*hist)[t];
      const std::string twhere = where + ".history[" + std::to_string(t) + "]";
      if (!turn.is_object()) throw SchemaError(twhere + ": expected an object");
      std::string speaker = required_string(turn, "speaker", twhere);
      Turn tr;
      if (speaker == "student") {
        tr.speaker = Speaker::Student;
      } else if (speaker == "tutor") {
        tr.speaker = Speaker::Tutor;
      } else {
        throw SchemaError(twhere + ": speaker must be \"student\" or \"tutor\", got \"" + speaker + "\"");
      }
      tr.text = required_string(turn, "text", twhere);
      d.history.push_back(std::move(tr));
    }

    auto resp = obj.find("tutor_responses");
    if (resp == obj.end()) throw SchemaError(where + ": missing required field \"tutor_responses\"");
    if (!resp->is_object()) throw SchemaError(where + ": field \"tutor_responses\" must be an object");
    for (const auto& [tutor_id, body] : resp->items()) {
      const std::string rwhere = where + ".tutor_responses[\"" + tutor_id + "\"]";
      if (!body.is_object()) throw SchemaError(rwhere + ": expected an object");
      TutorResponse r;
      r.tutor_id = tutor_id;
      r.text = required_string(body, "text", rwhere);
      if (auto ann = body.find("annotations"); ann != body.end() && !ann->is_null()) {
        if (!ann->is_object()) throw SchemaError(rwhere + ": field \"annotations\" must be an object");
        for (Track track : kAllTracks) {
          auto v = ann->find(std::string(annotation_key(track)));
          if (v == ann->end()) continue;
          if (!v->is_string())
            throw SchemaError(rwhere + ": annotation \"" + std::string(annotation_key(track)) + "\" must be a string");
          r.annotations.emplace(track, v->get<std::string>());
        }
      }
      d.responses.emplace(tutor_id, std::move(r));
    }

    if (!seen.insert(d.conversation_id).second)
      throw DuplicateKeyError(where + ": duplicate conversation_id \"" + d.conversation_id + "\"");
    try {
      validate_dialogue(d);
    } catch (const LabelParseError& e) {
      throw LabelParseError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(where + ": " + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<TutorDialogue> load_corpus(const std::filesystem::path& path) {
  std::string text = read_file(path);
  try {
    return parse_corpus(text);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Writes dialogues back in the raw corpus format (2-space indented JSON).
inline std::string serialize_corpus(const std::vector<TutorDialogue>& dialogues) {
  using nlohmann::ordered_json;
  ordered_json root = ordered_json::array();
  for (const auto& d : dialogues) {
    ordered_json obj;
    obj["conversation_id"] = d.conversation_id;
    if (d.source) obj["source"] = *d.source;
    ordered_json hist = ordered_json::array();
    for (const auto& t : d.history) {
      hist.push_back({{"speaker", detail::speaker_name(t.speaker)}, {"text", t.text}});
    }
    obj["history"] = std::move(hist);
    ordered_json resp = ordered_json::object();
    for (const auto& [id, r] : d.responses) {
      ordered_json body;
      body["text"] = r.text;
      if (!r.annotations.empty()) {
        ordered_json ann = ordered_json::object();
        for (const auto& [track, value] : r.annotations) ann[std::string(annotation_key(track))] = value;
        body["annotations"] = std::move(ann);
      }
      resp[id] = std::move(body);
    }
    obj["tutor_responses"] = std::move(resp);
    root.push_back(std::move(obj));
  }
  return root.dump(2) + "\n";
}

// Turns rendered as "Student: ..." / "Tutor: ..." lines in original order.
inline std::string flatten_dialogue(const TutorDialogue& dialogue) {
  std::string out;
  for (std::size_t i = 0; i < dialogue.history.size(); ++i) {
    if (i) out += '\n';
    const Turn& t = dialogue.history[i];
    out += t.speaker == Speaker::Student ? "Student: " : "Tutor: ";
    out += t.text;
  }
  return out;
}

inline InstructionRecord build_instruction_record(const TutorDialogue& dialogue, const std::string& tutor_id,
                                                  Track track) {
  auto it = dialogue.responses.find(tutor_id);
  if (it == dialogue.responses.end()) {
    throw LookupError("conversation \"" + dialogue.conversation_id + "\" has no tutor response \"" + tutor_id + "\"");
  }
  const TutorResponse& r = it->second;
  InstructionRecord rec;
  rec.instance_id = make_instance_id(dialogue.conversation_id, tutor_id);
  rec.instruction = std::string(prompt_template(track));
  rec.input = flatten_dialogue(dialogue);
  rec.input += kResponseJoiner;
  rec.input += r.text;
  if (auto a = r.annotations.find(track); a != r.annotations.end()) {
    try {
      rec.output = parse_label(a->second);
    } catch (const LabelParseError& e) {
      throw LabelParseError(rec.instance_id + ", " + std::string(annotation_key(track)) + ": " + e.what());
    }
  }
  return rec;
}

// All records selected by `mode`, sorted by instance_id.
inline std::vector<InstructionRecord> build_track_records(const std::vector<TutorDialogue>& dialogues, Track track,
                                                          ExportMode mode) {
  std::vector<InstructionRecord> records;
  for (const auto& d : dialogues) {
    for (const auto& [id, r] : d.responses) {
      if (mode == ExportMode::LabeledOnly && !r.annotations.contains(track)) continue;
      records.push_back(build_instruction_record(d, id, track));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const InstructionRecord& a, const InstructionRecord& b) { return a.instance_id < b.instance_id; });
  return records;
}

inline std::string to_jsonl_line(const InstructionRecord& rec) {
  nlohmann::ordered_json obj;
  obj["id"] = rec.instance_id;
  obj["instruction"] = rec.instruction;
  obj["input"] = rec.input;
  if (rec.output) obj["output"] = std::string(to_string(*rec.output));
  try {
    return obj.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(rec.instance_id + ": " + e.what());
  }
}

// One LF-terminated line per record; an empty selection gives "".
inline std::string export_track_jsonl(const std::vector<TutorDialogue>& dialogues, Track track, ExportMode mode) {
  std::string out;
  for (const auto& rec : build_track_records(dialogues, track, mode)) {
    out += to_jsonl_line(rec);
    out += '\n';
  }
  return out;
}

inline void export_track_jsonl(const std::vector<TutorDialogue>& dialogues, Track track, ExportMode mode,
                               const std::filesystem::path& path) {
  write_file(path, export_track_jsonl(dialogues, track, mode));
}

inline std::vector<InstructionRecord> parse_instruction_jsonl(std::string_view document) {
  std::vector<InstructionRecord> out;
  std::set<std::string> seen;
  for_each_jsonl(document, [&](std::size_t line, const nlohmann::json& obj) {
    const std::string where = "line " + std::to_string(line);
    InstructionRecord rec;
    rec.instance_id = required_string(obj, "id", where);
    rec.instruction = required_string(obj, "instruction", where);
    rec.input = required_string(obj, "input", where);
    if (obj.contains("output")) {
      try {
        rec.output = parse_label(required_string(obj, "output", where));
      } catch (const LabelParseError& e) {
        throw LabelParseError(where + ": " + e.what());
      }
    }
    if (!seen.insert(rec.instance_id).second)
      throw DuplicateKeyError(where + ": duplicate id \"" + rec.instance_id + "\"");
    out.push_back(std::move(rec));
  });
  return out;
}

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t responses = 0;
  std::map<std::string, std::size_t> dialogues_by_source;  // "" for dialogues without a source
  std::map<std::string, double> mean_turns_by_source;
};

inline CorpusStats summarize(const std::vector<TutorDialogue>& dialogues) {
  CorpusStats s;
  std::map<std::string, std::size_t> turns;
  for (const auto& d : dialogues) {
    const std::string src = d.source.value_or("");
    ++s.dialogues;
    s.responses += d.responses.size();
    ++s.dialogues_by_source[src];
    turns[src] += d.history.size();
  }
  for (const auto& [src, n] : s.dialogues_by_source) {
    s.mean_turns_by_source[src] = static_cast<double>(turns[src]) / static_cast<double>(n);
  }
  return s;
}

}  // namespace msaeval
