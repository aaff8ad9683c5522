#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "raredis/evaluation.hpp"
#include "raredis/types.hpp"

namespace raredis {

enum class ErrorCategory {
  BoundaryOnly,
  TypeOnly,
  BoundaryAndType,
  Spurious,
  Missed,
};

inline constexpr std::array<ErrorCategory, 5> kAllErrorCategories = {
    ErrorCategory::BoundaryOnly, ErrorCategory::TypeOnly,
    ErrorCategory::BoundaryAndType, ErrorCategory::Spurious,
    ErrorCategory::Missed};

const char* to_string(ErrorCategory c);

struct ErrorRecord {
  ErrorCategory category = ErrorCategory::Spurious;
  std::string doc_id;
  std::optional<Prediction> pred;   // absent only for Missed
  std::optional<GoldEntity> gold;   // absent only for Spurious
  EntityType attributed_type = EntityType::RareDisease;
};

// Staged greedy one-to-one pairing per document over predictions pooled
// across all entity-type prompts: exact+same type (TP, no record), then
// exact+different type, then overlap+same type, then overlap+different
// type; leftovers are Spurious / Missed. Paired and Missed records are
// attributed to the gold's type, Spurious to the prediction's.
std::vector<ErrorRecord> classify_errors(const std::vector<Prediction>& preds,
                                         const DocIndex& docs,
                                         const StopWords& stopwords);

struct ErrorTableRow {
  std::array<std::size_t, 5> counts{};   // indexed by ErrorCategory
  std::array<int, 5> percentages{};      // sum to 100 when total > 0
  std::size_t total = 0;
};

struct ErrorTable {
  std::array<ErrorTableRow, 4> rows{};  // indexed by attributed EntityType
};

ErrorTable error_table(const std::vector<ErrorRecord>& records);

std::string error_table_to_markdown(const ErrorTable& table);
std::string error_table_to_csv(const ErrorTable& table);
std::string error_records_to_jsonl(const std::vector<ErrorRecord>& records);

}  // namespace raredis
