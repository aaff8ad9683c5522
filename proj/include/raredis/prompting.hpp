#pragma once

#include <optional>
#include <string>
#include <vector>

#include "raredis/types.hpp"

namespace raredis {

enum class PromptSetting { Zero, Few };
enum class PromptFormat { Simple, Structured };

const char* to_string(PromptSetting s);
const char* to_string(PromptFormat f);
std::optional<PromptSetting> prompt_setting_from_string(const std::string& s);
std::optional<PromptFormat> prompt_format_from_string(const std::string& s);

struct FewShotExample {
  std::string text;                        // training passage
  std::vector<std::string> gold_surfaces;  // gold mentions, document order
};

struct PromptSpec {
  PromptSetting setting = PromptSetting::Zero;
  PromptFormat format = PromptFormat::Simple;
  EntityType etype = EntityType::RareDisease;
  std::string definition;
  std::optional<FewShotExample> example;
  std::string input_text;
};

struct RenderedPrompt {
  std::string text;
  std::size_t token_estimate = 0;  // ceil(chars / 4)
  std::string spec_fingerprint;
};

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Entity definition used as task guidance; from the annotation guidelines.
std::string default_definition(EntityType etype);

// Gold surfaces joined ", " in document order, deduplicated
// case-insensitively keeping the first occurrence.
std::string join_gold_labels(const std::vector<std::string>& surfaces);

// Deterministic, byte-stable rendering of one of the four prompt variants.
RenderedPrompt render_prompt(const PromptSpec& spec);

}  // namespace raredis
