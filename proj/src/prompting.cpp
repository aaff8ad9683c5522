#include "raredis/prompting.hpp"

#include <set>
#include <sstream>

#include "raredis/text.hpp"

namespace raredis {

const char* to_string(PromptSetting s) {
  return s == PromptSetting::Zero ? "zero" : "few";
}

const char* to_string(PromptFormat f) {
  return f == PromptFormat::Simple ? "simple" : "structured";
}

std::optional<PromptSetting> prompt_setting_from_string(const std::string& s) {
  std::string k = ascii_lower(s);
  if (k == "zero" || k == "zero-shot") return PromptSetting::Zero;
  if (k == "few" || k == "few-shot") return PromptSetting::Few;
  return std::nullopt;
}

std::optional<PromptFormat> prompt_format_from_string(const std::string& s) {
  std::string k = ascii_lower(s);
  if (k == "simple") return PromptFormat::Simple;
  if (k == "structured") return PromptFormat::Structured;
  return std::nullopt;
}

std::string default_definition(EntityType etype) {
  switch (etype) {
    case EntityType::RareDisease:
      return "diseases that affect a small number of individuals";
    case EntityType::Disease:
      return "an abnormal condition of a part, organ, or system of an "
             "organism resulting from various causes, such as infection, "
             "inflammation, environmental factors, or genetic defect, and "
             "characterized by an identifiable group of signs, symptoms, or "
             "both";
    case EntityType::Symptom:
      return "a physical or mental problem that may indicate a disease or "
             "condition; cannot be seen and do not show up on medical tests";
    case EntityType::Sign:
      return "a physical or mental problem that may indicate a disease or "
             "condition; can be seen and shows up on medical tests";
  }
  return "";
}

std::string join_gold_labels(const std::vector<std::string>& surfaces) {
  std::string out;
  std::set<std::string> seen;
  for (const std::string& s : surfaces) {
    std::string key = ascii_lower(normalize_ws(s));
    if (key.empty() || !seen.insert(key).second) continue;
    if (!out.empty()) out += ", ";
    out += normalize_ws(s);
  }
  return out;
}

namespace {

std::string capitalized_plural(EntityType t) {
  std::string p = entity_plural(t);
  if (!p.empty() && p[0] >= 'a' && p[0] <= 'z') p[0] -= 32;
  return p;
}

std::string simple_instruction(const PromptSpec& spec) {
  std::ostringstream out;
  out << "Extract the exact names of " << entity_plural(spec.etype)
      << ", which are " << spec.definition
      << ", from this passage and output them in a list:";
  return out.str();
}

std::string spec_canonical(const PromptSpec& spec) {
  std::ostringstream out;
  out << to_string(spec.setting) << '\x1f' << to_string(spec.format) << '\x1f'
      << to_string(spec.etype) << '\x1f' << spec.definition << '\x1f';
  if (spec.example) {
    out << spec.example->text << '\x1f'
        << join_gold_labels(spec.example->gold_surfaces);
  }
  out << '\x1f' << spec.input_text;
  return out.str();
}

}  // namespace

RenderedPrompt render_prompt(const PromptSpec& spec) {
  if (spec.input_text.empty()) throw PromptError("empty input text");
  if (spec.definition.empty()) throw PromptError("empty definition");
  if (spec.setting == PromptSetting::Few && !spec.example) {
    throw PromptError("few-shot prompt requires an example");
  }

  std::ostringstream out;
  if (spec.format == PromptFormat::Simple) {
    if (spec.setting == PromptSetting::Zero) {
      out << simple_instruction(spec) << " \"" << spec.input_text << "\"";
    } else {
      out << "Passage: \"" << spec.example->text << "\"\n"
          << simple_instruction(spec) << ' '
          << join_gold_labels(spec.example->gold_surfaces) << "\n\n"
          << "Passage: \"" << spec.input_text << "\"\n"
          << simple_instruction(spec);
    }
  } else {
    // The few-shot task line carries a comma after the entity name and the
    // zero-shot one does not; both follow the published wording.
    if (spec.setting == PromptSetting::Zero) {
      out << "### Task:\nExtract the exact names of " << entity_plural(spec.etype)
          << " from the input text and output them in a list.\n\n"
          << "### Definition:\n" << capitalized_plural(spec.etype)
          << " are defined as " << spec.definition << ".\n\n"
          << "### Input text: \"" << spec.input_text << "\"\n\n"
          << "### Output:";
    } else {
      out << "### Task:\nExtract the exact names of " << entity_plural(spec.etype)
          << ", from the input text and output them in a list.\n\n"
          << "### Definition:\n" << capitalized_plural(spec.etype)
          << " are defined as " << spec.definition << ".\n\n"
          << "### Input text: \"" << spec.example->text << "\"\n\n"
          << "### Output: " << join_gold_labels(spec.example->gold_surfaces)
          << "\n\n"
          << "### Input text: \"" << spec.input_text << "\"\n\n"
          << "### Output:";
    }
  }

  RenderedPrompt rendered;
  rendered.text = out.str();
  rendered.token_estimate = (rendered.text.size() + 3) / 4;
  rendered.spec_fingerprint = fnv1a64_hex(spec_canonical(spec));
  return rendered;
}

}  // namespace raredis
