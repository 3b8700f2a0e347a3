#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rippling/annotation.hpp"
#include "rippling/term.hpp"

namespace rippling {

/// An annotated rewrite rule whose two sides share a skeleton and whose
/// right side has the smaller measure.
struct WaveRule {
    AnnTerm lhs;
    AnnTerm rhs;
    std::string source;
    // Certificate.
    Term skeleton;
    Measure lhs_measure;
    Measure rhs_measure;

    Equation erased() const { return {erase(lhs), erase(rhs)}; }
};

std::string format_wave_rule(const WaveRule& r);

/// Re-derives every certificate field from lhs and rhs.
bool check_certificate(const WaveRule& r);

/// Annotations of `eq` (oriented left to right) that are wave rules. Rules
/// whose fronts have a single hole come first, then cheaper ones, then
/// those with fewer fronts. Extra rules from one equation are named
/// `source/2`, `source/3`, ...
std::vector<WaveRule> derive_wave_rules(const Equation& eq, const std::string& source);

struct RippleStep {
    WaveRule rule;
    Position position;
    Substitution subst;
    AnnTerm before;
    AnnTerm after;
};

/// Every admissible single step, by rule order then preorder position.
/// Steps that break well-formedness, lose the skeleton or fail to reduce
/// the measure are dropped.
std::vector<RippleStep> ripple_step(const AnnTerm& goal, const std::vector<WaveRule>& rules);

enum class RippleOutcome { fully_rippled, blocked, fertilized };
const char* to_string(RippleOutcome o);

struct RippleTrace {
    AnnTerm initial;
    std::vector<RippleStep> steps;
    RippleOutcome outcome = RippleOutcome::blocked;

    const AnnTerm& final_goal() const { return steps.empty() ? initial : steps.back().after; }
};

struct RippleOptions {
    /// When set, the goal counts as fully rippled once fertilization with
    /// this hypothesis is possible.
    std::optional<Equation> hypothesis;
    /// Hypothesis variables that may not be instantiated.
    VarSet rigid;
    std::size_t max_steps = 50;
};

RippleTrace ripple(const AnnTerm& goal, const std::vector<WaveRule>& rules, const RippleOptions& opts = {});

struct Fertilization {
    Equation hypothesis;  // as oriented for this rewrite
    Position position;
    Substitution subst;
    AnnTerm before;
    AnnTerm after;
};

/// Rewrites once with the hypothesis at the leftmost-innermost subterm that
/// lies outside wavefront material and carries no marks below its root.
/// Tries left to right first; right to left only if the right side is not
/// a variable.
std::optional<Fertilization> fertilize(const AnnTerm& goal, const Equation& hypothesis, const VarSet& rigid);

std::string format_step(const RippleStep& s);
std::string format_fertilization(const Fertilization& f);
std::string format_trace(const RippleTrace& t);

}  // namespace rippling
