#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dimaudit/table.hpp"
#include "test_helpers.hpp"

using namespace dimaudit;
namespace fs = std::filesystem;

namespace {

fs::path write_fixture(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "dimaudit_tests";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

TableSchema two_attr_schema() {
    TableSchema schema;
    schema.id_column = "player_id";
    schema.rating_column = "overall";
    schema.attribute_columns = {"speed", "power"};
    return schema;
}

} // namespace

TEST_CASE("load_table: direct parse of a 3-row file") {
    const auto path = write_fixture("basic.csv",
                                    "player_id,overall,speed,power\n"
                                    "a,70,60,50\n"
                                    "b,65,55,45\n"
                                    "c,80,75,70\n");
    const RatingTable table = load_table(path.string(), two_attr_schema());
    CHECK(table.rows.size() == 3);
    CHECK(table.attribute_names == std::vector<std::string>{"speed", "power"});
    CHECK(table.rows[0].player_id == "a");
    CHECK(*table.rows[2].attributes[1] == 70.0);
}

TEST_CASE("load_table: non-numeric cells become missing") {
    const auto path = write_fixture("missing.csv",
                                    "player_id,overall,speed,power\n"
                                    "a,70,NA,50\n"
                                    "b,none,55,\n");
    const RatingTable table = load_table(path.string(), two_attr_schema());
    CHECK_FALSE(table.rows[0].attributes[0].has_value());
    CHECK(table.rows[0].attributes[1].has_value());
    CHECK_FALSE(table.rows[1].overall.has_value());
    CHECK_FALSE(table.rows[1].attributes[1].has_value());
}

TEST_CASE("load_table: errors") {
    CHECK_THROWS_AS(load_table("/does/not/exist.csv", two_attr_schema()), std::runtime_error);

    const auto path = write_fixture("bad_header.csv", "player_id,overall,speed\na,70,60\n");
    CHECK_THROWS_AS(load_table(path.string(), two_attr_schema()), std::runtime_error);

    TableSchema duplicated = two_attr_schema();
    duplicated.attribute_columns = {"speed", "speed"};
    const auto ok_path = write_fixture("dup.csv", "player_id,overall,speed,power\na,70,60,50\n");
    CHECK_THROWS_AS(load_table(ok_path.string(), duplicated), std::invalid_argument);
}

TEST_CASE("aggregate_players: means per player, missing cells ignored") {
    RatingTable table;
    table.attribute_names = {"speed"};
    table.rows = {
        {"a", "2008", 70.0, {60.0}},
        {"a", "2009", 72.0, {70.0}},
        {"b", "2008", 65.0, {55.0}},
        {"c", "2008", 60.0, {60.0}},
        {"c", "2009", 62.0, {std::nullopt}},
        {"c", "2010", 64.0, {70.0}},
    };
    const RatingTable agg = aggregate_players(table);
    REQUIRE(agg.rows.size() == 3);
    CHECK(*agg.rows[0].attributes[0] == doctest::Approx(65.0)); // {60, 70}
    CHECK(*agg.rows[1].attributes[0] == doctest::Approx(55.0)); // single season unchanged
    CHECK(*agg.rows[2].attributes[0] == doctest::Approx(65.0)); // {60, missing, 70}
    CHECK(*agg.rows[0].overall == doctest::Approx(71.0));
}

TEST_CASE("aggregate_players: all-missing stays missing; idempotence") {
    RatingTable table;
    table.attribute_names = {"speed", "power"};
    table.rows = {
        {"a", "", 70.0, {std::nullopt, 50.0}},
        {"a", "", 71.0, {std::nullopt, 52.0}},
        {"b", "", 60.0, {40.0, 41.0}},
    };
    const RatingTable once = aggregate_players(table);
    CHECK_FALSE(once.rows[0].attributes[0].has_value());
    CHECK(*once.rows[0].attributes[1] == doctest::Approx(51.0));

    const RatingTable twice = aggregate_players(once);
    REQUIRE(twice.rows.size() == once.rows.size());
    for (std::size_t i = 0; i < once.rows.size(); ++i) {
        CHECK(twice.rows[i].player_id == once.rows[i].player_id);
        CHECK(twice.rows[i].overall == once.rows[i].overall);
        CHECK(twice.rows[i].attributes == once.rows[i].attributes);
    }
}

TEST_CASE("load_table: ragged row is an error") {
    const auto path = write_fixture("ragged.csv",
                                    "player_id,overall,speed,power\n"
                                    "a,70,60\n");
    CHECK_THROWS_AS(load_table(path.string(), two_attr_schema()), std::runtime_error);
}

TEST_CASE("aggregate_players: empty table is an error") {
    RatingTable table;
    table.attribute_names = {"speed"};
    CHECK_THROWS_AS(aggregate_players(table), std::invalid_argument);
}

TEST_CASE("filter_complete: listwise deletion") {
    RatingTable table;
    table.attribute_names = {"speed", "power"};
    table.rows = {
        {"a", "", 70.0, {60.0, 50.0}},
        {"b", "", 65.0, {std::nullopt, 45.0}},
        {"c", "", 80.0, {75.0, 70.0}},
        {"d", "", 61.0, {50.0, 40.0}},
    };
    const AttributeMatrix m = filter_complete(table, {"speed", "power"});
    CHECK(m.values.rows() == 3);
    CHECK(m.player_ids == std::vector<std::string>{"a", "c", "d"});

    // no missing cells representable: values are plain doubles, scan bounds
    for (double v : m.values.data()) CHECK(std::isfinite(v));
}

TEST_CASE("filter_complete: missing overall drops the row") {
    RatingTable table;
    table.attribute_names = {"speed", "power"};
    table.rows = {
        {"a", "", 70.0, {60.0, 50.0}},
        {"b", "", std::nullopt, {55.0, 45.0}},
        {"c", "", 80.0, {75.0, 70.0}},
        {"d", "", 62.0, {55.0, 45.0}},
    };
    const AttributeMatrix m = filter_complete(table, {"speed", "power"});
    CHECK(m.values.rows() == 3);
}

TEST_CASE("filter_complete: errors") {
    RatingTable table;
    table.attribute_names = {"speed", "power"};
    table.rows = {
        {"a", "", 70.0, {60.0, 50.0}},
        {"b", "", 65.0, {55.0, 45.0}},
        {"c", "", 80.0, {75.0, 70.0}},
    };
    CHECK_THROWS_AS(filter_complete(table, {}), std::invalid_argument);
    CHECK_THROWS_AS(filter_complete(table, {"speed", "unknown"}), std::invalid_argument);
    // 3 complete rows for p = 2 satisfies n > p; dropping one breaks it
    table.rows[2].attributes[0] = std::nullopt;
    CHECK_THROWS_AS(filter_complete(table, {"speed", "power"}), std::runtime_error);
}

TEST_CASE("describe: hand-checked column stats") {
    Matrix values(3, 2);
    values(0, 0) = 1.0;
    values(1, 0) = 2.0;
    values(2, 0) = 3.0;
    values(0, 1) = 5.0;
    values(1, 1) = 5.0;
    values(2, 1) = 5.0;
    AttributeMatrix m = testutil::wrap_matrix(values, {70.0, 71.0, 72.0});
    const DescriptiveStats stats = describe(m);
    REQUIRE(stats.variables.size() == 3); // overall + 2 attributes
    CHECK(stats.variables[0].name == "overall_rating");
    const VariableStats& a1 = stats.variables[1];
    CHECK(a1.mean == doctest::Approx(2.0));
    CHECK(a1.min == 1.0);
    CHECK(a1.max == 3.0);
    CHECK(a1.count == 3);
    CHECK(stats.variables[2].sd == doctest::Approx(0.0)); // constant column
    CHECK(stats.sample_sd);
}

TEST_CASE("describe: standardized columns have mean 0 within 1e-10") {
    dimaudit::Rng rng(5);
    Matrix x(40, 3);
    for (auto& cell : x.data()) cell = 50.0 + 10.0 * rng.next_gaussian();
    AttributeMatrix m = testutil::wrap_matrix(standardize(x).values);
    const DescriptiveStats stats = describe(m);
    for (std::size_t j = 1; j < stats.variables.size(); ++j)
        CHECK(std::abs(stats.variables[j].mean) < 1e-10);
}
