#pragma once

// Rating-table ingestion: raw rows -> player-level means -> complete-case
// attribute matrix, plus descriptive statistics.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dimaudit/linalg.hpp"

namespace dimaudit {

struct RatingRow {
    std::string player_id;
    std::string season; // empty when the source has no season column
    std::optional<double> overall;
    std::vector<std::optional<double>> attributes; // aligned with RatingTable::attribute_names
};

struct RatingTable {
    std::vector<std::string> attribute_names;
    std::vector<RatingRow> rows;
};

// Complete-case matrix: no missing cells, one row per kept player.
struct AttributeMatrix {
    Matrix values;
    std::vector<std::string> attribute_names;
    std::vector<std::string> player_ids;
    std::vector<double> overall;
};

struct VariableStats {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct DescriptiveStats {
    std::vector<VariableStats> variables; // overall rating first, then attributes
    bool sample_sd = true;                // n-1 denominator when true
};

// Maps logical roles onto source column names.
struct TableSchema {
    std::string id_column;
    std::string season_column; // empty = no season column
    std::string rating_column;
    std::vector<std::string> attribute_columns;
};

// Parses a header CSV according to the schema. Non-numeric cells in attribute
// or rating columns become missing values.
RatingTable load_table(const std::string& path, const TableSchema& schema);

// One output row per player_id (first-appearance order); each attribute and the
// overall rating become the mean over that player's rows, ignoring missing
// cells. A cell stays missing only if missing in all of the player's rows.
RatingTable aggregate_players(const RatingTable& table);

// Keeps rows complete on `required` (column order follows `required`) with an
// overall rating present. Throws when fewer than required.size()+1 rows
// survive.
AttributeMatrix filter_complete(const RatingTable& table,
                                const std::vector<std::string>& required);

DescriptiveStats describe(const AttributeMatrix& matrix);

// The 28 outfield attribute columns of the source rating database. The paper
// names only examples, so this list is a documented reconstruction; override
// it via configuration when the extract uses different columns.
const std::vector<std::string>& default_outfield_attributes();

} // namespace dimaudit
