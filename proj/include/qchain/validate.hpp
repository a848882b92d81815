#pragma once

#include <string>
#include <vector>

namespace qchain {

struct CheckResult {
    std::string name;
    bool ok;
    std::string detail;
};

/// Fast self-check battery over the library's physical invariants
/// (symplecticity, purity conservation, route agreement, witness soundness,
/// state validity). Backs the `validate` CLI subcommand.
std::vector<CheckResult> run_validation_suite();

}  // namespace qchain
