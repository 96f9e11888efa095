#include <iostream>

#include "mpelab/verify.hpp"

int main() {
    const auto results = mpelab::run_acceptance({});
    std::size_t passed = 0;
    for (const auto& r : results) {
        std::cout << "[" << (r.passed ? "PASS" : "FAIL") << "] criterion " << r.id << " " << r.name
                  << ": " << r.actual << "\n";
        passed += r.passed ? 1 : 0;
    }
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? 0 : 1;
}
