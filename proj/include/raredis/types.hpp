#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace raredis {

enum class EntityType { RareDisease, Disease, Sign, Symptom };

inline constexpr std::array<EntityType, 4> kAllEntityTypes = {
    EntityType::RareDisease, EntityType::Disease, EntityType::Sign,
    EntityType::Symptom};

// Canonical short name, used in JSON output and CLI flags.
const char* to_string(EntityType t);
std::optional<EntityType> entity_type_from_string(const std::string& s);

// Plural surface form used inside prompts ("rare diseases", "signs", ...).
const char* entity_plural(EntityType t);

// Character span, 0-based, end-exclusive. Offsets count Unicode scalar
// values, not bytes.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  std::size_t length() const { return end - start; }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
};

struct GoldEntity {
  std::string id;
  EntityType etype = EntityType::RareDisease;
  std::vector<Span> fragments;  // >=1, sorted by start, non-overlapping
  std::string surface;          // fragment slices joined with a single space

  Span extent() const { return {fragments.front().start, fragments.back().end}; }
};

struct Document {
  std::string doc_id;
  std::string text;  // UTF-8
  std::vector<GoldEntity> entities;
};

struct Prediction {
  std::string doc_id;
  EntityType etype = EntityType::RareDisease;
  std::string extracted;
  std::optional<Span> span;

  bool grounded() const { return span.has_value(); }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace raredis
