// Acceptance runner: `acceptance [criterion...] [--seed S] [--constants FILE]`.
// Prints one line per criterion; exit 0 iff every requested criterion passes.

#include "smallball/error.hpp"
#include "smallball/verify.hpp"

#include <iostream>
#include <string>
#include <vector>

using namespace smallball;

int main(int argc, char** argv) {
    VerifyContext ctx;
    std::string constants = SMALLBALL_DEFAULT_CONSTANTS;
    std::vector<int> wanted;
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--seed" && i + 1 < argc) {
                ctx.seed = std::stoull(argv[++i]);
            } else if (arg == "--constants" && i + 1 < argc) {
                constants = argv[++i];
            } else {
                wanted.push_back(std::stoi(arg[0] == 'A' ? arg.substr(1) : arg));
            }
        }
        ctx.constants = ConstantSet::load(constants);
    } catch (const std::exception& e) {
        std::cerr << "usage: acceptance [A01..A13 | 1..13]... [--seed S] [--constants FILE]: " << e.what() << "\n";
        return 2;
    }

    std::vector<CriterionResult> results;
    if (wanted.empty()) {
        results = verify_all(ctx);
    } else {
        for (const int n : wanted) results.push_back(run_criterion(n, ctx));
    }
    bool pass = true;
    for (const auto& r : results) {
        std::cout << r.summary_line() << "\n";
        pass = pass && r.pass;
    }
    return pass ? 0 : 1;
}
