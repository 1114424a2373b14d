// Runs acceptance criteria A1..A10 and prints one pass/fail line per criterion.
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "yl/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria A1..A10"};
    yl::AcceptanceOptions opt;
    std::vector<std::string> only;
    std::string report;
    app.add_option("--seed", opt.seed, "Seed for the randomized suites");
    app.add_option("--digits", opt.digits, "Working precision for A8 and A9")->check(CLI::Range(15u, 200u));
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--report", report, "Write the full JSON report here");
    CLI11_PARSE(app, argc, argv);
    if (only.empty()) only = yl::criterion_ids();

    nlohmann::json all = nlohmann::json::array();
    bool ok = true;
    for (const auto& id : only) {
        auto r = yl::run_criterion(id, opt);
        ok = ok && r.pass();
        std::cout << std::left << std::setw(4) << r.id << (r.pass() ? "PASS" : "FAIL") << "  " << std::fixed
                  << std::setprecision(2) << r.seconds << "s (budget " << r.budget << "s)  " << r.title << std::endl;
        all.push_back(r.to_json());
    }
    nlohmann::json out = {{"seed", opt.seed}, {"digits", opt.digits}, {"criteria", all}};
    if (!report.empty()) std::ofstream(report) << out.dump(2) << "\n";
    else std::cerr << out.dump(2) << "\n";
    return ok ? 0 : 1;
}
