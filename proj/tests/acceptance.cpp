// Acceptance gate: every release-blocking property, one pass/fail line
// each. Exit status is the number of failed properties (0 = all green).
#include <cstdlib>
#include <iostream>
#include <string>

#include "dimer/criteria.hpp"

int main(int argc, char** argv) {
    dimer::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--long") options.long_run = true;
        else if (arg == "--threads" && i + 1 < argc) options.threads = std::atoi(argv[++i]);
        else if (arg == "--scratch" && i + 1 < argc) options.scratch_dir = argv[++i];
        else {
            std::cerr << "usage: acceptance [--long] [--threads T] [--scratch DIR]\n";
            return 2;
        }
    }
    const auto results = dimer::run_acceptance(options);
    return dimer::print_acceptance(results, std::cout);
}
