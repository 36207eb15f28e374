#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msaeval/distribution.hpp"
#include "msaeval/error.hpp"
#include "msaeval/format.hpp"
#include "msaeval/label.hpp"
#include "msaeval/track.hpp"

namespace msaeval {

// Scores for one run, as percentages in [0, 100].
struct RunResult {
  Track track = Track::MistakeIdentification;
  std::string run_name;
  double strict_f1 = 0.0;
  double lenient_f1 = 0.0;
  double strict_acc = 0.0;
  double lenient_acc = 0.0;

  std::array<double, 4> columns() const { return {strict_f1, lenient_f1, strict_acc, lenient_acc}; }

  void validate() const {
    for (double v : columns()) {
      if (!std::isfinite(v) || v < 0.0 || v > 100.0)
        throw ValidationError("run \"" + run_name + "\": percentages must lie in [0, 100]");
    }
  }

  bool operator==(const RunResult&) const = default;
};

enum class TableFormat { Markdown, Tsv };

namespace detail {

inline std::int64_t cents(double pct) { return std::llround(pct * 100.0); }

}  // namespace detail

// Rows grouped by track (track order, then input order). Within each track,
// the best value of every column is marked, comparing at display precision
// so equal printed values are all marked: bold in markdown, a trailing '*'
// in TSV.
inline std::string render_run_table(std::span<const RunResult> results, TableFormat format) {
  if (results.empty()) throw EmptyInputError("no run results to render");
  for (const auto& r : results) r.validate();

  std::vector<const RunResult*> rows;
  for (Track t : kAllTracks) {
    for (const auto& r : results) {
      if (r.track == t) rows.push_back(&r);
    }
  }

  std::array<std::array<std::int64_t, 4>, 4> best{};
  for (auto& b : best) b.fill(-1);
  for (const RunResult* r : rows) {
    auto cols = r->columns();
    auto& b = best[static_cast<std::size_t>(r->track)];
    for (std::size_t c = 0; c < 4; ++c) b[c] = std::max(b[c], detail::cents(cols[c]));
  }
  auto is_best = [&](const RunResult& r, std::size_t c) {
    return detail::cents(r.columns()[c]) == best[static_cast<std::size_t>(r.track)][c];
  };

  std::string out;
  if (format == TableFormat::Markdown) {
    out += "| Track | Run | Strict F1 | Lenient F1 | Strict Acc. | Lenient Acc. |\n";
    out += "|---|---|---:|---:|---:|---:|\n";
    for (const RunResult* r : rows) {
      out += "| ";
      out += display_name(r->track);
      out += " | ";
      out += r->run_name;
      auto cols = r->columns();
      for (std::size_t c = 0; c < 4; ++c) {
        std::string cell = fixed(cols[c]) + "%";
        if (is_best(*r, c)) cell = "**" + cell + "**";
        out += " | " + cell;
      }
      out += " |\n";
    }
  } else {
    out += "track\trun\tstrict_f1\tlenient_f1\tstrict_acc\tlenient_acc\n";
    for (const RunResult* r : rows) {
      out += cli_name(r->track);
      out += '\t';
      out += r->run_name;
      auto cols = r->columns();
      for (std::size_t c = 0; c < 4; ++c) {
        out += '\t';
        out += fixed(cols[c]);
        if (is_best(*r, c)) out += '*';
      }
      out += '\n';
    }
  }
  return out;
}

// Reads the TSV layout above. A header line is required; '*' best markers
// and '%' signs are accepted and ignored.
inline std::vector<RunResult> parse_run_tsv(std::string_view text) {
  auto split = [](std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return f;
  };
  auto number = [](std::string_view s, std::size_t line_no) {
    while (!s.empty() && (s.back() == '*' || s.back() == '%' || s.back() == ' ')) s.remove_suffix(1);
    try {
      return parse_fraction(s);
    } catch (const ValidationError&) {
      throw ParseError("results line " + std::to_string(line_no) + ": not a number \"" + std::string(s) + "\"");
    }
  };

  std::vector<RunResult> out;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto f = split(line);
    if (!header) {
      if (f.size() != 6 || f[0] != "track" || f[1] != "run" || f[2] != "strict_f1" || f[3] != "lenient_f1" ||
          f[4] != "strict_acc" || f[5] != "lenient_acc")
        throw ParseError("results line " + std::to_string(line_no) +
                         ": expected header track, run, strict_f1, lenient_f1, strict_acc, lenient_acc");
      header = true;
      continue;
    }
    if (f.size() != 6)
      throw ParseError("results line " + std::to_string(line_no) + ": expected 6 tab-separated fields, got " +
                       std::to_string(f.size()));
    RunResult r;
    r.track = parse_track(f[0]);
    r.run_name = std::string(f[1]);
    r.strict_f1 = number(f[2], line_no);
    r.lenient_f1 = number(f[3], line_no);
    r.strict_acc = number(f[4], line_no);
    r.lenient_acc = number(f[5], line_no);
    r.validate();
    out.push_back(std::move(r));
  }
  if (!header) throw ParseError("results: missing header line");
  return out;
}

using NamedDistribution = std::pair<std::string, LabelDistribution>;

// One row per label, one percentage column per source, then a delta column
// (percentage points) for every source after the first, measured against
// the first.
inline std::string render_distribution_report(std::span<const NamedDistribution> sources) {
  if (sources.empty()) throw EmptyInputError("no distributions to report");

  std::vector<std::string> header{"label"};
  for (const auto& [name, _] : sources) header.push_back(name);
  for (std::size_t s = 1; s < sources.size(); ++s) header.push_back(sources[s].first + "-" + sources[0].first);

  std::vector<std::vector<std::string>> body;
  for (Label l : {Label::Yes, Label::ToSomeExtent, Label::No}) {
    std::vector<std::string> row{std::string(to_string(l))};
    for (const auto& [_, dist] : sources) row.push_back(percent(dist[l]) + "%");
    for (std::size_t s = 1; s < sources.size(); ++s) {
      double delta = 100.0 * (sources[s].second[l] - sources[0].second[l]);
      std::string d = fixed(delta);
      if (d != "0.00" && d.front() != '-') d.insert(0, "+");
      row.push_back(d);
    }
    body.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line = pad_right(row[0], width[0]);
    for (std::size_t c = 1; c < row.size(); ++c) line += "  " + pad_left(row[c], width[c]);
    line += '\n';
    return line;
  };
  std::string out = emit(header);
  for (const auto& row : body) out += emit(row);
  return out;
}

}  // namespace msaeval
