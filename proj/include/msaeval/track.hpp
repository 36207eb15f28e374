#pragma once

#include <array>
#include <string>
#include <string_view>

#include "msaeval/error.hpp"

namespace msaeval {

enum class Track { MistakeIdentification = 0, MistakeLocation = 1, ProvidingGuidance = 2, Actionability = 3 };

inline constexpr std::array<Track, 4> kAllTracks{Track::MistakeIdentification, Track::MistakeLocation,
                                                 Track::ProvidingGuidance, Track::Actionability};

// Human-readable name, as printed in report tables.
inline std::string_view display_name(Track t) {
  switch (t) {
    case Track::MistakeIdentification: return "Mistake Identification";
    case Track::MistakeLocation: return "Mistake Location";
    case Track::ProvidingGuidance: return "Providing Guidance";
    case Track::Actionability: return "Actionability";
  }
  return "?";
}

// Key used in the raw corpus "annotations" object.
inline std::string_view annotation_key(Track t) {
  switch (t) {
    case Track::MistakeIdentification: return "Mistake_Identification";
    case Track::MistakeLocation: return "Mistake_Location";
    case Track::ProvidingGuidance: return "Providing_Guidance";
    case Track::Actionability: return "Actionability";
  }
  return "?";
}

// snake_case name accepted on the command line and in TSV files.
inline std::string_view cli_name(Track t) {
  switch (t) {
    case Track::MistakeIdentification: return "mistake_identification";
    case Track::MistakeLocation: return "mistake_location";
    case Track::ProvidingGuidance: return "providing_guidance";
    case Track::Actionability: return "actionability";
  }
  return "?";
}

inline Track parse_track(std::string_view s) {
  for (Track t : kAllTracks) {
    if (s == cli_name(t) || s == annotation_key(t) || s == display_name(t)) return t;
  }
  throw DomainError("unknown track \"" + std::string(s) +
                    "\" (expected mistake_identification, mistake_location, providing_guidance or actionability)");
}

}  // namespace msaeval
