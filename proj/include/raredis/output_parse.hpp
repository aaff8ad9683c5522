#pragma once

#include <string>
#include <vector>

namespace raredis {

struct ParsedOutput {
  std::vector<std::string> items;
  // Set when no list structure was found and the whole response had to be
  // kept as a single candidate; such records deserve manual audit.
  bool unstructured = false;
};

// Extracts entity-name strings from a model response: numbered lists,
// bullets, one-item-per-line, or a comma-separated single line. Refusal
// markers ("None", "no rare diseases mentioned", ...) yield an empty list.
// Items keep their original casing; duplicates are removed
// case-insensitively keeping the first occurrence.
ParsedOutput parse_llm_output(const std::string& raw_text);

}  // namespace raredis
