#include <doctest.h>

#include <fstream>
#include <iterator>

#include "helpers.hpp"
#include "vortexsim/modes.hpp"
#include "vortexsim/scenario.hpp"

using namespace vortexsim;

namespace {

json small_scenario() {
    return json::parse(R"({
      "scenario": "small",
      "grid": {"nx": 128, "ny": 128, "dx_m": 8e-6, "dy_m": 8e-6},
      "sources": [
        {"id": "a", "wavelength_m": 780e-9, "mode": {"p": 0, "l": 1, "waist_m": 100e-6}},
        {"id": "b", "wavelength_m": 776e-9, "mode": {"p": 0, "l": 0, "waist_m": 100e-6},
         "elements": [{"type": "spiral_plate", "charge": 1}]}
      ],
      "fwm": [{"id": "blue", "pump780": "a", "pump776": "b"}],
      "propagate": [{"id": "blue_far", "from": "blue", "dz_m": 0.01}],
      "diagnostics": [
        {"id": "spec", "type": "oam_spectrum", "field": "blue_far"},
        {"id": "core", "type": "doughnut", "field": "blue"},
        {"id": "pw", "type": "power", "field": "a"},
        {"id": "pic", "type": "intensity_image", "field": "blue", "image": "blue.pgm"}
      ],
      "expectations": [
        {"name": "charge", "diagnostic": "spec", "quantity": "dominant_charge", "equals": "blue.expected_charge"},
        {"name": "weight", "diagnostic": "spec", "quantity": "weight", "l": 2, "min": 0.99},
        {"name": "dark core", "diagnostic": "core", "quantity": "doughnut", "equals": true},
        {"name": "unit power", "diagnostic": "pw", "quantity": "power", "equals": 1.0, "tolerance": 1e-9}
      ],
      "outputs": {"fields": ["blue"]}
    })");
}

std::string parse_message(const std::string& text) {
    try {
        parse_scenario_text(text, "case.json");
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

std::vector<unsigned char> bytes_of(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("syntax errors name the line and column") {
    const std::string msg = parse_message("{\n  \"scenario\": ,\n}");
    CHECK(msg.rfind("case.json:2:", 0) == 0);
}

TEST_CASE("schema errors name the offending field") {
    json d = small_scenario();
    d["sources"][0]["colour"] = "red";
    CHECK(parse_message(d.dump()).find("scenario.sources[0].colour: unknown key") != std::string::npos);

    d = small_scenario();
    d["sources"][1]["elements"][0]["type"] = "prism";
    CHECK(parse_message(d.dump()).find("scenario.sources[1].elements[0].type") != std::string::npos);

    d = small_scenario();
    d["grid"]["dx_m"] = "fine";
    CHECK(parse_message(d.dump()).find("scenario.grid.dx_m: expected a number") != std::string::npos);

    d = small_scenario();
    d["fwm"][0]["geometry"] = {{"crossing_angle_mrad", 30.0}};
    CHECK(parse_message(d.dump()).find("scenario.fwm[0].geometry") != std::string::npos);
}

TEST_CASE("references must resolve to earlier stages") {
    json d = small_scenario();
    d["fwm"][0]["pump776"] = "c";
    CHECK(parse_message(d.dump()).find("unresolved field reference 'c'") != std::string::npos);

    d = small_scenario();
    d["propagate"][0]["from"] = "blue_far";
    CHECK(!parse_message(d.dump()).empty());

    d = small_scenario();
    d["expectations"][0]["diagnostic"] = "nothing";
    CHECK(parse_message(d.dump()).find("unresolved diagnostic reference") != std::string::npos);

    d = small_scenario();
    d["sources"][1]["id"] = "a";
    CHECK(parse_message(d.dump()).find("duplicate id 'a'") != std::string::npos);
}

TEST_CASE("a passing scenario writes its artifacts and verdicts") {
    const auto dir = testutil::scratch_dir("scenario");
    RunOptions o;
    o.out_dir = dir.string();
    const ScenarioOutcome out = run_scenario(small_scenario(), o);
    CHECK(out.exit_code == kExitPass);
    const json& r = out.report;
    REQUIRE(r["expectations"].size() == 4);
    for (const auto& e : r["expectations"]) {
        CHECK(e.contains("expected"));
        CHECK(e.contains("measured"));
        CHECK(e["pass"].get<bool>());
    }
    CHECK(r["results"]["fwm"]["blue"]["expected_charge"] == 2);
    CHECK(r["results"]["diagnostics"]["spec"]["dominant_charge"] == 2);
    CHECK(std::filesystem::exists(dir / "small_blue.vtxf"));
    CHECK(std::filesystem::exists(dir / "blue.pgm"));
    CHECK(std::filesystem::exists(dir / "small_report.json"));
    // every image is summarized
    REQUIRE(r["results"]["images"].size() == 1);
    CHECK(r["results"]["images"][0]["path"] == "blue.pgm");
    CHECK(r["results"]["images"][0]["max"].get<double>() > 0.0);
    CHECK(r["meta"].contains("runtime_s"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("failing expectations exit 1 with a verdict for each") {
    json d = small_scenario();
    d["expectations"][1]["min"] = 1.5;
    RunOptions o;
    o.write_files = false;
    const ScenarioOutcome out = run_scenario(d, o);
    CHECK(out.exit_code == kExitExpectation);
    CHECK(out.report["expectations"][0]["pass"] == true);
    CHECK(out.report["expectations"][1]["pass"] == false);
}

TEST_CASE("validation and sampling failures map to exit codes") {
    RunOptions o;
    o.write_files = false;
    json d = small_scenario();
    d["diagnostics"][0]["field"] = "ghost";
    CHECK(run_scenario(d, o).exit_code == kExitUsage);

    d = small_scenario();
    d["propagate"][0]["dz_m"] = 40.0;
    const ScenarioOutcome out = run_scenario(d, o);
    CHECK(out.exit_code == kExitSampling);
    CHECK(out.report["error"]["kind"] == "sampling");
    CHECK(out.report["expectations"].size() == 4);

    d = small_scenario();
    d["fwm"][0]["pump780"] = "b";  // wavelength does not match lambda1
    CHECK(run_scenario(d, o).exit_code == kExitUsage);
}

TEST_CASE("grid override parsing and application") {
    const GridOverride g = parse_grid_override("256x128@2e-6");
    CHECK(g.nx == 256);
    CHECK(g.ny == 128);
    CHECK(*g.pitch == 2e-6);
    CHECK_FALSE(parse_grid_override("64x64").pitch);
    CHECK_THROWS_AS(parse_grid_override("64"), ParseError);
    CHECK_THROWS_AS(parse_grid_override("64x64@-1"), ParseError);
    CHECK_THROWS_AS(parse_grid_override("8x8"), ParseError);

    RunOptions o;
    o.write_files = false;
    o.grid_override = parse_grid_override("192x192@6e-6");
    const ScenarioOutcome out = run_scenario(small_scenario(), o);
    CHECK(out.exit_code == kExitPass);
    CHECK(out.report["grid"]["nx"] == 192);
    CHECK(out.report["grid"]["dx_m"] == 6e-6);
}

TEST_CASE("repeated runs are byte-identical apart from metadata") {
    const auto d1 = testutil::scratch_dir("det1"), d2 = testutil::scratch_dir("det2");
    RunOptions o1, o2;
    o1.out_dir = d1.string();
    o2.out_dir = d2.string();
    const auto r1 = run_scenario(small_scenario(), o1);
    const auto r2 = run_scenario(small_scenario(), o2);
    CHECK(without_meta(r1.report).dump() == without_meta(r2.report).dump());
    CHECK_FALSE(without_meta(r1.report).contains("meta"));
    CHECK(bytes_of(d1 / "small_blue.vtxf") == bytes_of(d2 / "small_blue.vtxf"));
    CHECK(bytes_of(d1 / "blue.pgm") == bytes_of(d2 / "blue.pgm"));
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("canned panels are all present and valid") {
    const auto names = figure_names();
    CHECK(names == std::vector<std::string>{"fig1e", "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig5"});
    for (const auto& n : names) CHECK_NOTHROW(parse_scenario_text(canned_scenario(n), n));
    try {
        canned_scenario("fig9");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("fig4a") != std::string::npos);
    }
}

TEST_CASE("fig4b panel reads one stripe of negative inclination") {
    RunOptions o;
    o.write_files = false;
    const ScenarioOutcome out = run_figure("fig4b", o);
    CHECK(out.exit_code == kExitPass);
    const json& s = out.report["results"]["diagnostics"]["blue_stripes"];
    CHECK(s["count"] == 1);
    CHECK(s["sign"] == -1);
    CHECK(out.report["results"]["diagnostics"]["blue_oam"]["dominant_charge"] == -1);
}

TEST_CASE("fig5 cancellation leaves a chargeless doughnut") {
    RunOptions o;
    o.write_files = false;
    const ScenarioOutcome out = run_figure("fig5", o);
    CHECK(out.exit_code == kExitPass);
    const json& d = out.report["results"]["diagnostics"];
    CHECK(d["cancel_oam"]["dominant_charge"] == 0);
    CHECK(d["cancel_stripes"]["count"] == 0);
    CHECK(d["cancel_core"]["doughnut"] == true);
    CHECK(d["double_stripes"]["count"] == 2);
}

TEST_CASE("measure analyses a stored field") {
    const auto dir = testutil::scratch_dir("measure");
    save_field(lg_mode(testutil::kGrid, 780e-9, {0, -2, 100e-6, 0.0}), (dir / "v.vtxf").string());
    RunOptions o;
    o.out_dir = dir.string();
    const ScenarioOutcome out = measure_field_file((dir / "v.vtxf").string(), o);
    CHECK(out.exit_code == kExitPass);
    CHECK(out.report["results"]["oam_spectrum"]["dominant_charge"] == -2);
    CHECK(out.report["results"]["tilted_lens"]["signed_count"] == -2);
    CHECK(std::filesystem::exists(dir / "v_tilted.pgm"));
    CHECK(measure_field_file((dir / "missing.vtxf").string(), o).exit_code == kExitUsage);
    std::filesystem::remove_all(dir);
}
