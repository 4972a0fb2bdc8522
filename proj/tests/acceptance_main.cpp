// Acceptance suite: runs every replication criterion at its stated tolerance
// and enforces the per-criterion runtime budgets.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "acim/replicate.hpp"

int main() {
    std::filesystem::path out = std::filesystem::temp_directory_path() / "acim_acceptance";
    std::filesystem::create_directories(out);
    acim::ReplicateSummary summary = acim::replicate_paper(out.string(), 20240614ULL);
    acim::print_summary(summary, std::cout);

    bool ok = summary.all_passed();
    for (const acim::CriterionResult& c : summary.criteria) {
        if (c.elapsed_s >= c.budget_s) {
            std::cout << "FAIL criterion " << c.id << " exceeded its runtime budget ("
                      << c.elapsed_s << " s >= " << c.budget_s << " s)\n";
            ok = false;
        }
    }
    std::cout << (ok ? "acceptance: PASS" : "acceptance: FAIL") << std::endl;
    return ok ? 0 : 1;
}
