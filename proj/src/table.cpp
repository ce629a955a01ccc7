#include "dimaudit/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dimaudit/csv.hpp"

namespace dimaudit {

const std::vector<std::string>& default_outfield_attributes() {
    static const std::vector<std::string> names = {
        "crossing",      "finishing",     "heading_accuracy", "short_passing",
        "volleys",       "dribbling",     "curve",            "free_kick_accuracy",
        "long_passing",  "ball_control",  "acceleration",     "sprint_speed",
        "agility",       "reactions",     "balance",          "shot_power",
        "jumping",       "stamina",       "strength",         "long_shots",
        "aggression",    "interceptions", "positioning",      "vision",
        "penalties",     "marking",       "standing_tackle",  "sliding_tackle"};
    return names;
}

namespace {

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const char* role) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            if (found != header.size())
                throw std::runtime_error(std::string("load_table: duplicate ") + role +
                                         " column '" + name + "' in header");
            found = i;
        }
    }
    if (found == header.size())
        throw std::runtime_error(std::string("load_table: ") + role + " column '" + name +
                                 "' not found in header");
    return found;
}

} // namespace

RatingTable load_table(const std::string& path, const TableSchema& schema) {
    if (schema.attribute_columns.empty())
        throw std::invalid_argument("load_table: schema names no attribute columns");
    {
        auto sorted = schema.attribute_columns;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("load_table: duplicate attribute column names in schema");
    }

    const auto records = csv::read_file(path);
    if (records.empty()) throw std::runtime_error("load_table: empty file: " + path);
    const auto& header = records.front();

    const std::size_t id_col = find_column(header, schema.id_column, "id");
    const std::size_t rating_col = find_column(header, schema.rating_column, "rating");
    std::size_t season_col = header.size();
    if (!schema.season_column.empty())
        season_col = find_column(header, schema.season_column, "season");
    std::vector<std::size_t> attr_cols;
    attr_cols.reserve(schema.attribute_columns.size());
    for (const auto& name : schema.attribute_columns)
        attr_cols.push_back(find_column(header, name, "attribute"));

    RatingTable table;
    table.attribute_names = schema.attribute_columns;
    table.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size())
            throw std::runtime_error("load_table: row " + std::to_string(r) + " has " +
                                     std::to_string(rec.size()) + " fields, header has " +
                                     std::to_string(header.size()));
        RatingRow row;
        row.player_id = rec[id_col];
        if (row.player_id.empty())
            throw std::runtime_error("load_table: empty player id at row " + std::to_string(r));
        if (season_col < header.size()) row.season = rec[season_col];
        double value = 0.0;
        if (csv::parse_double(rec[rating_col], value)) row.overall = value;
        row.attributes.reserve(attr_cols.size());
        for (std::size_t c : attr_cols) {
            if (csv::parse_double(rec[c], value))
                row.attributes.emplace_back(value);
            else
                row.attributes.emplace_back(std::nullopt);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

RatingTable aggregate_players(const RatingTable& table) {
    if (table.rows.empty()) throw std::invalid_argument("aggregate_players: empty table");
    const std::size_t p = table.attribute_names.size();

    struct Accum {
        std::vector<double> sums;
        std::vector<std::size_t> counts;
        double overall_sum = 0.0;
        std::size_t overall_count = 0;
        std::size_t out_index = 0;
    };

    std::unordered_map<std::string, Accum> by_player;
    std::vector<const std::string*> order;
    for (const auto& row : table.rows) {
        auto [it, inserted] = by_player.try_emplace(row.player_id);
        Accum& acc = it->second;
        if (inserted) {
            acc.sums.assign(p, 0.0);
            acc.counts.assign(p, 0);
            acc.out_index = order.size();
            order.push_back(&it->first);
        }
        for (std::size_t j = 0; j < p; ++j) {
            if (row.attributes[j]) {
                acc.sums[j] += *row.attributes[j];
                ++acc.counts[j];
            }
        }
        if (row.overall) {
            acc.overall_sum += *row.overall;
            ++acc.overall_count;
        }
    }

    RatingTable out;
    out.attribute_names = table.attribute_names;
    out.rows.resize(order.size());
    for (const auto& [id, acc] : by_player) {
        RatingRow row;
        row.player_id = id;
        if (acc.overall_count > 0)
            row.overall = acc.overall_sum / static_cast<double>(acc.overall_count);
        row.attributes.reserve(p);
        for (std::size_t j = 0; j < p; ++j) {
            if (acc.counts[j] > 0)
                row.attributes.emplace_back(acc.sums[j] / static_cast<double>(acc.counts[j]));
            else
                row.attributes.emplace_back(std::nullopt);
        }
        out.rows[acc.out_index] = std::move(row);
    }
    return out;
}

AttributeMatrix filter_complete(const RatingTable& table,
                                const std::vector<std::string>& required) {
    if (required.size() < 2)
        throw std::invalid_argument("filter_complete: need at least 2 required attributes");
    std::vector<std::size_t> cols;
    cols.reserve(required.size());
    for (const auto& name : required) {
        auto it = std::find(table.attribute_names.begin(), table.attribute_names.end(), name);
        if (it == table.attribute_names.end())
            throw std::invalid_argument("filter_complete: unknown attribute '" + name + "'");
        cols.push_back(static_cast<std::size_t>(it - table.attribute_names.begin()));
    }

    std::vector<std::size_t> keep;
    keep.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (!row.overall) continue;
        bool complete = true;
        for (std::size_t c : cols) {
            if (!row.attributes[c]) {
                complete = false;
                break;
            }
        }
        if (complete) keep.push_back(i);
    }

    const std::size_t p = required.size();
    if (keep.size() <= p)
        throw std::runtime_error("filter_complete: only " + std::to_string(keep.size()) +
                                 " complete rows for " + std::to_string(p) +
                                 " attributes (need n > p)");

    AttributeMatrix out;
    out.attribute_names = required;
    out.values = Matrix(keep.size(), p);
    out.player_ids.reserve(keep.size());
    out.overall.reserve(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto& row = table.rows[keep[r]];
        out.player_ids.push_back(row.player_id);
        out.overall.push_back(*row.overall);
        for (std::size_t j = 0; j < p; ++j) out.values(r, j) = *row.attributes[cols[j]];
    }
    return out;
}

namespace {

VariableStats column_stats(const std::string& name, std::span<const double> v, bool sample) {
    VariableStats s;
    s.name = name;
    s.count = v.size();
    s.mean = mean_of(v);
    s.sd = v.size() > 1 ? std::sqrt(variance_of(v, sample)) : 0.0;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    return s;
}

} // namespace

DescriptiveStats describe(const AttributeMatrix& matrix) {
    DescriptiveStats stats;
    stats.sample_sd = true;
    stats.variables.reserve(matrix.attribute_names.size() + 1);
    stats.variables.push_back(column_stats("overall_rating", matrix.overall, stats.sample_sd));

    const std::size_t n = matrix.values.rows();
    std::vector<double> col(n);
    for (std::size_t j = 0; j < matrix.attribute_names.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = matrix.values(i, j);
        stats.variables.push_back(column_stats(matrix.attribute_names[j], col, stats.sample_sd));
    }
    return stats;
}

} // namespace dimaudit
