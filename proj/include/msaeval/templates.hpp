#pragma once

#include <string_view>

#include "msaeval/track.hpp"

namespace msaeval {

// Evaluation prompts, one per track. These strings are part of the data
// contract: exported instruction files must reproduce them byte-for-byte.
namespace templates {

inline constexpr std::string_view kMistakeIdentification =
    "TASK DEFINITION:\n"
    "\n"
    "You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response "
    "accurately identifies a mistake in the student's reasoning or solution.\n"
    "\n"
    "EVALUATION CRITERIA:\n"
    "\n"
    "1.\"Yes\"– The tutor accurately identifies a mistake in the student’s response.\n"
    "2.\"To some extent\"– The tutor shows some awareness, but it is ambiguous or uncertain.\n"
    "3.\"No\"– The tutor fails to identify or misunderstands the mistake.";

inline constexpr std::string_view kMistakeLocation =
    "TASK DEFINITION:\n"
    "\n"
    "You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response "
    "accurately points to a genuine mistake and its location in the student's response.\n"
    "\n"
    "EVALUATION CRITERIA:\n"
    "\n"
    "1.\"Yes\"– The tutor clearly points to the exact location of the mistake.\n"
    "2.\"To some extent\"– The tutor refers to a mistake but is vague or indirect.\n"
    "3.\"No\"– The tutor provides no indication of where the mistake occurred.";

inline constexpr std::string_view kProvidingGuidance =
    "TASK DEFINITION:\n"
    "\n"
    "You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's response "
    "provides correct and relevant guidance to help the student.\n"
    "\n"
    "EVALUATION CRITERIA:\n"
    "\n"
    "1.\"Yes\"– The tutor gives helpful guidance such as a hint or explanation.\n"
    "2.\"To some extent\"– The guidance is partially helpful, unclear, or incomplete.\n"
    "3.\"No\"– The guidance is absent, irrelevant, or factually incorrect.";

inline constexpr std::string_view kActionability =
    "TASK DEFINITION:\n"
    "\n"
    "You are an expert evaluator of AI tutor responses. Your task is to determine whether the tutor's feedback "
    "is actionable, i.e., it clearly suggests what the student should do next.\n"
    "\n"
    "EVALUATION CRITERIA:\n"
    "\n"
    "1.\"Yes\"– The response includes clear next steps for the student.\n"
    "2.\"To some extent\"– Some action is implied, but it is not clearly stated.\n"
    "3.\"No\"– No action is suggested or the feedback ends the conversation.";

}  // namespace templates

inline std::string_view prompt_template(Track t) {
  switch (t) {
    case Track::MistakeIdentification: return templates::kMistakeIdentification;
    case Track::MistakeLocation: return templates::kMistakeLocation;
    case Track::ProvidingGuidance: return templates::kProvidingGuidance;
    case Track::Actionability: return templates::kActionability;
  }
  return {};
}

}  // namespace msaeval
