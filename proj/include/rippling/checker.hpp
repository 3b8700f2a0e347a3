#pragma once

#include <string>
#include <vector>

#include "rippling/prover.hpp"
#include "rippling/theory.hpp"

namespace rippling {

struct CheckResult {
    bool ok = false;
    std::string error;
    std::vector<std::string> assumed;  // lemmas taken without proof
};

/// Replays a proof tree with plain rewriting only. Definitions may be used
/// in either direction, as may lemmas proved inside the tree and induction
/// hypotheses of the enclosing case. Annotations are ignored.
CheckResult replay_check(const ProofNode& root, const Theory& th, bool allow_assumed = false);

}  // namespace rippling
