#pragma once

#include <string>
#include <vector>

#include "raredis/types.hpp"

namespace raredis {

// Maps extracted strings back to character spans in the document:
// case-insensitive whole-token matching with flexible whitespace, longest
// string grounded first, occurrences claimed left-to-right with each span
// used at most once. Strings with no free occurrence stay ungrounded.
std::vector<Prediction> ground(const std::vector<std::string>& extracted_strings,
                               const Document& doc, EntityType etype);

// All whole-token occurrences of `needle` in `text32`, in document order.
std::vector<Span> find_occurrences(const std::u32string& text32,
                                   const std::string& needle);

}  // namespace raredis
