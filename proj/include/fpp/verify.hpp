#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20250817;
    std::string work_dir = "acceptance_out";  // scratch space for determinism checks
    int threads = 1;
    bool quick = false;  // reduced replication counts; tolerances unchanged
};

// Runs the ten acceptance checks in order, streaming one line per
// criterion to log. Never throws for a failed criterion, only for setup
// errors (e.g. unwritable work_dir).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace fpp
