#include "raredis/types.hpp"

#include "raredis/text.hpp"

namespace raredis {

const char* to_string(EntityType t) {
  switch (t) {
    case EntityType::RareDisease: return "RareDisease";
    case EntityType::Disease: return "Disease";
    case EntityType::Sign: return "Sign";
    case EntityType::Symptom: return "Symptom";
  }
  return "?";
}

std::optional<EntityType> entity_type_from_string(const std::string& s) {
  std::string k = ascii_lower(s);
  if (k == "raredisease" || k == "rare_disease" || k == "rare-disease")
    return EntityType::RareDisease;
  if (k == "disease") return EntityType::Disease;
  if (k == "sign") return EntityType::Sign;
  if (k == "symptom") return EntityType::Symptom;
  return std::nullopt;
}

const char* entity_plural(EntityType t) {
  switch (t) {
    case EntityType::RareDisease: return "rare diseases";
    case EntityType::Disease: return "diseases";
    case EntityType::Sign: return "signs";
    case EntityType::Symptom: return "symptoms";
  }
  return "?";
}

}  // namespace raredis
