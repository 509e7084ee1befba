#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mesim/scenario.hpp"
#include "mesim/synth.hpp"

using namespace mesim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path d = fs::temp_directory_path() / (std::string("mesim_test_") + tag);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

} // namespace

TEST_CASE("calendar arithmetic across month and year boundaries") {
    TimeGrid t{"2021-01-31T23:45:00", 900.0, 100};
    CHECK(t.month_of(0) == 1);
    CHECK(t.month_of(1) == 2);
    CHECK(t.timestamp_of(1) == "2021-02-01T00:00:00");

    TimeGrid y{"2020-02-28T00:00:00", 900.0, 300};
    CHECK(y.timestamp_of(96) == "2020-02-29T00:00:00"); // leap year
    CHECK(y.month_of(96 * 2) == 3);

    TimeGrid e{"2021-12-31T23:45:00", 900.0, 10};
    CHECK(e.timestamp_of(1) == "2022-01-01T00:00:00");
}

TEST_CASE("series files are strict about horizon and shape") {
    fs::path d = temp_dir("series");
    write(d / "ok.csv", "timestamp,node_id,value\nt0,4,1.5\nt1,4,2.5\n");
    SeriesTable t = load_series_csv((d / "ok.csv").string(), 2);
    CHECK(t.at(4, 0) == 1.5);
    CHECK(t.at(4, 1) == 2.5);
    CHECK(t.at(9, 1) == 0.0); // absent nodes read as zero
    CHECK(t.total(1) == 2.5);

    write(d / "short.csv", "timestamp,node_id,value\nt0,4,1.5\n");
    CHECK_THROWS_AS(load_series_csv((d / "short.csv").string(), 2), HorizonMismatch);

    write(d / "bad.csv", "timestamp,node_id,value\nt0,4\n");
    CHECK_THROWS_AS(load_series_csv((d / "bad.csv").string(), 1), ParseError);

    write(d / "nan.csv", "timestamp,node_id,value\nt0,four,1.0\n");
    CHECK_THROWS_AS(load_series_csv((d / "nan.csv").string(), 1), ParseError);

    CHECK_THROWS_AS(load_series_csv((d / "missing.csv").string(), 1), ParseError);
}

TEST_CASE("root branches are inferred from transformer tags") {
    fs::path d = temp_dir("egrid");
    write(d / "grid.json", R"({
        "slack": 0,
        "nodes": [{"id": 0}, {"id": 1, "transformer": 1}, {"id": 2, "transformer": 1},
                  {"id": 3, "transformer": 2}],
        "branches": [{"from": 0, "to": 1, "r_pu": 0.01, "x_pu": 0.02},
                     {"from": 1, "to": 2, "r_pu": 0.01, "x_pu": 0.02},
                     {"from": 0, "to": 3, "r_ohm": 0.484, "x_ohm": 0.968}],
        "transformers": [{"id": 1}, {"id": 2}]
    })");
    ElectricGrid g = load_electric_grid((d / "grid.json").string());
    REQUIRE(g.transformers.size() == 2);
    CHECK(g.transformers[0].root_branches == std::vector<int>{0});
    CHECK(g.transformers[1].root_branches == std::vector<int>{2});
    // 0.484 ohm on the 48.4 ohm base
    CHECK(g.branches[2].z.real() == doctest::Approx(0.01).epsilon(1e-12));

    write(d / "nokey.json", R"({"slack": 0, "nodes": []})");
    CHECK_THROWS_AS(load_electric_grid((d / "nokey.json").string()), SchemaError);
}

TEST_CASE("the bundled example loads, validates and hashes reproducibly") {
    fs::path d = temp_dir("bundle");
    write_example(d.string());
    Scenario sc = load_scenario((d / "scenario.json").string());
    CHECK(sc.electric.nodes.size() == 43);
    CHECK(sc.gas.nodes.size() == 70);
    CHECK(sc.plants.size() == 3);
    CHECK(sc.time.steps == 2688);
    CHECK(sc.selected_case == CaseTag::Reference);
    CHECK(sc.initial_buffer_soc == 0.5);
    CHECK(sc.control.plant_transformer.at(3) == 3);
    CHECK(sc.config_hash.size() == 16);

    // identical bytes, identical hash; touched bytes change it
    Scenario again = load_scenario((d / "scenario.json").string());
    CHECK(again.config_hash == sc.config_hash);
    std::ofstream(d / "el_gen.csv", std::ios::app) << "extra\n";
    CHECK_THROWS(load_scenario((d / "scenario.json").string())); // row count broke
    write_example(d.string());                                   // restore

    ScenarioOverrides ov;
    ov.case_name = "lpgn";
    ov.lpp2g_eta = 0.5;
    Scenario o = load_scenario((d / "scenario.json").string(), ov);
    CHECK(o.selected_case == CaseTag::LPGN);
    CHECK(o.lpp2g_eta == 0.5);
}

TEST_CASE("validation rejects a plant on a missing node") {
    fs::path d = temp_dir("badplant");
    write_example(d.string());
    // point plant 3 at a gas node that does not exist
    std::ifstream in(d / "scenario.json");
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = body.find("\"gas_node\": 45");
    REQUIRE(pos != std::string::npos);
    body.replace(pos, 14, "\"gas_node\": 99");
    write(d / "scenario.json", body);
    CHECK_THROWS_AS(load_scenario((d / "scenario.json").string()), DanglingReference);
}
