// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "modp/verify.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    modp::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc) opt.seed = std::stoull(argv[++i]);
        else if (a == "--only" && i + 1 < argc) opt.only.push_back(argv[++i]);
        else if (a == "--mass-samples" && i + 1 < argc) opt.mass_samples = std::atol(argv[++i]);
        else {
            std::cerr << "usage: modp_acceptance [--seed N] [--only KEY]... [--mass-samples N]\n";
            return 2;
        }
    }
    bool all = true;
    for (auto& r : modp::run_acceptance(opt)) {
        std::cout << modp::format_line(r) << std::endl;
        all = all && r.pass;
    }
    std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return all ? 0 : 1;
}
