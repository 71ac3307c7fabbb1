#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "vortexsim/acceptance.hpp"
#include "vortexsim/scenario.hpp"

using namespace vortexsim;

namespace {

void print_outcome(const std::string& label, const ScenarioOutcome& out) {
    const json& r = out.report;
    if (r.contains("error")) {
        std::cerr << label << ": " << r["error"]["kind"].get<std::string>() << " error: " << r["error"]["message"].get<std::string>() << "\n";
    }
    for (const auto& e : r["expectations"]) {
        if (e["measured"].is_null() && r.contains("error")) continue;
        std::cout << (e["pass"].get<bool>() ? "  pass  " : "  FAIL  ") << e["name"].get<std::string>() << ": measured "
                  << e["measured"].dump() << ", expected " << e["expected"].dump() << "\n";
    }
    std::cout << label << ": exit " << out.exit_code;
    if (!out.report_file.empty()) std::cout << ", report " << out.report_file;
    std::cout << "\n";
}

// runs jobs sequentially, or one thread per job; returns the largest exit code
int run_jobs(const std::vector<std::string>& labels, const std::function<ScenarioOutcome(const std::string&)>& job, bool parallel) {
    std::vector<ScenarioOutcome> outcomes(labels.size());
    if (parallel && labels.size() > 1) {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < labels.size(); ++i) threads.emplace_back([&, i] { outcomes[i] = job(labels[i]); });
        for (auto& t : threads) t.join();
        for (std::size_t i = 0; i < labels.size(); ++i) print_outcome(labels[i], outcomes[i]);
    } else {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            outcomes[i] = job(labels[i]);
            print_outcome(labels[i], outcomes[i]);
        }
    }
    int code = kExitPass;
    for (const auto& o : outcomes) code = std::max(code, o.exit_code);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalar wave-optics simulator for optical vortices and four-wave-mixing charge arithmetic"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string grid_override;
    std::string report_path;
    bool parallel = false;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "Directory for images, fields and reports")->capture_default_str();
        sub->add_option("--grid-override", grid_override, "Replace the scenario grid: NXxNY or NXxNY@PITCH_M");
        sub->add_option("--report", report_path, "Report path (single scenario only)");
    };

    std::vector<std::string> files;
    auto* simulate = app.add_subcommand("simulate", "Run scenario files");
    simulate->add_option("scenarios", files, "Scenario JSON files")->required();
    simulate->add_flag("--parallel", parallel, "Run independent scenarios concurrently");
    common(simulate);

    std::vector<std::string> figures;
    auto* figure = app.add_subcommand("figure", "Run canned figure panels");
    figure->add_option("names", figures, "Panel names or 'all'")->required();
    figure->add_flag("--parallel", parallel, "Run panels concurrently");
    common(figure);

    std::string field_path;
    auto* measure = app.add_subcommand("measure", "Analyse a stored VTXF field");
    measure->add_option("field", field_path, "VTXF file")->required();
    measure->add_option("--out-dir", out_dir, "Directory for images and the report")->capture_default_str();
    measure->add_option("--report", report_path, "Report path");

    std::vector<int> only;
    int perturb = 0;
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
    selftest->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, 9));
    selftest->add_option("--perturb", perturb, "Tighten one criterion's tolerances past attainability")->check(CLI::Range(1, 9));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    RunOptions opts;
    opts.out_dir = out_dir;
    if (!report_path.empty()) opts.report_path = report_path;
    try {
        if (!grid_override.empty()) opts.grid_override = parse_grid_override(grid_override);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    if (*simulate || *figure) {
        std::vector<std::string> labels = *simulate ? files : figures;
        if (*figure && std::find(labels.begin(), labels.end(), "all") != labels.end()) labels = figure_names();
        if (*figure) {
            for (const auto& n : labels) {
                try {
                    canned_scenario(n);
                } catch (const Error& e) {
                    std::cerr << e.what() << "\n";
                    return kExitUsage;
                }
            }
        }
        if (opts.report_path && labels.size() > 1) {
            std::cerr << "--report needs exactly one scenario\n";
            return kExitUsage;
        }
        std::error_code ec;
        std::filesystem::create_directories(opts.out_dir, ec);
        if (*simulate) return run_jobs(labels, [&](const std::string& f) { return run_scenario_file(f, opts); }, parallel);
        return run_jobs(labels, [&](const std::string& n) { return run_figure(n, opts); }, parallel);
    }

    if (*measure) {
        const ScenarioOutcome out = measure_field_file(field_path, opts);
        print_outcome(field_path, out);
        if (out.exit_code == kExitPass) std::cout << out.report["results"].dump(2) << "\n";
        return out.exit_code;
    }

    AcceptanceOptions ao;
    ao.only.insert(only.begin(), only.end());
    if (perturb > 0) ao.perturb = perturb;
    bool all = true;
    double total = 0.0;
    run_acceptance(ao, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        all = all && r.pass;
        total += r.seconds;
    });
    std::cout << (all ? "selftest passed" : "selftest FAILED") << " in " << total << " s\n";
    return all ? kExitPass : kExitExpectation;
}
