#pragma once

#include <span>
#include <string>
#include <vector>

#include "agentran/model/intent.hpp"
#include "agentran/reasoner/prompt.hpp"

namespace agentran::reasoner {

// Keyword extraction of structured requirements from operator text. Clauses
// naming a slice apply to it; clauses about "any user", "the system" and
// similar apply to every slice. A negation ("do not", "without") flips the
// keywords that follow it in the same clause. Result is sorted by slice_id.
std::vector<model::SliceRequirement> parse_intent_text(const std::string& text, std::span<const SliceInfo> slices);

}  // namespace agentran::reasoner
