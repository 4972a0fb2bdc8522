#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace acim {

struct CheckRow {
    std::string metric;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<CheckRow> rows;
    double elapsed_s = 0.0;
    double budget_s = 0.0;

    bool passed() const {
        for (const CheckRow& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

struct ReplicateSummary {
    std::vector<CriterionResult> criteria;

    bool all_passed() const {
        for (const CriterionResult& c : criteria)
            if (!c.passed()) return false;
        return true;
    }
    bool within_budgets() const {
        for (const CriterionResult& c : criteria)
            if (c.elapsed_s >= c.budget_s) return false;
        return true;
    }
};

// Runs the full replication suite; writes replicate.csv (deterministic, no
// wall times) into out_dir when non-empty.
ReplicateSummary replicate_paper(const std::string& out_dir, uint64_t seed);

// One line per criterion plus its check rows; includes wall times.
void print_summary(const ReplicateSummary& s, std::ostream& os);

}  // namespace acim
