#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "msaeval/error.hpp"

namespace msaeval {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

// 1-based line and column of a byte offset.
struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
};

inline TextPosition position_of(std::string_view text, std::size_t byte_offset) {
  TextPosition pos;
  for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// Calls `visit(line_number, object)` for every non-blank line of a JSONL
// document. Malformed lines raise ParseError carrying the line number.
inline void for_each_jsonl(std::string_view document,
                           const std::function<void(std::size_t, const nlohmann::json&)>& visit) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < document.size()) {
    std::size_t end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    ++line_no;
    std::string_view line = document.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) throw ParseError("line " + std::to_string(line_no) + ": expected a JSON object");
    visit(line_no, obj);
  }
}

// String member lookup for JSONL records; `where` prefixes error messages.
inline std::string required_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing required field \"" + key + "\"");
  if (!it->is_string()) throw SchemaError(where + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace msaeval
