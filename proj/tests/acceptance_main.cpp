#include <iostream>
#include <string>

#include "vortexsim/acceptance.hpp"

int main(int argc, char** argv) {
    vortexsim::AcceptanceOptions opts;
    for (int i = 1; i < argc; ++i) opts.only.insert(std::stoi(argv[i]));
    bool all = true;
    vortexsim::run_acceptance(opts, [&](const vortexsim::CriterionResult& r) {
        std::cout << vortexsim::format_result(r) << std::endl;
        all = all && r.pass;
    });
    return all ? 0 : 1;
}
