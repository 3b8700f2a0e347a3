#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rippling/ripple.hpp"
#include "rippling/theory.hpp"

namespace rippling {

class ProverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InductionCase {
    std::string constructor;
    Term instance;                    // what the induction variable becomes
    std::vector<std::string> fresh;   // variables introduced by the instance
    std::vector<Equation> hypotheses; // one per recursive argument
};

struct InductionScheme {
    std::string variable;
    std::string datatype;
    std::vector<InductionCase> cases;
};

/// Candidate schemes, best first. Variables are ranked by how often they
/// occur directly in recursive argument positions of defined functions,
/// then by leftmost occurrence.
std::vector<InductionScheme> recursion_analysis(const Equation& conjecture, const Theory& th);

/// Instantiates the induction variable for each constructor.
InductionScheme induction_scheme(const Equation& conjecture, const std::string& var, const Theory& th);

enum class NodeKind { induction, base_simplify, simplify, ripple, fertilize, reflexivity, lemma_use, open };
const char* to_string(NodeKind k);

/// One proof step. Rewriting nodes turn `goal` into the goal of their only
/// child through `steps`, whose positions address the term `(= lhs rhs)`.
/// An induction node has one child per case.
struct ProofNode {
    NodeKind kind = NodeKind::open;
    Equation goal;
    std::vector<RewriteStep> steps;

    // ripple and fertilize nodes keep the annotated derivation for display
    std::optional<RippleTrace> trace;
    std::optional<Fertilization> fertilization;

    // induction
    std::string variable;
    std::string datatype;
    std::vector<InductionCase> cases;

    // lemma_use: children are the lemma's proof (unless assumed) and then
    // the proof that uses it
    Rule lemma;
    bool assumed = false;

    std::string note;
    std::vector<ProofNode> children;
};

bool closed(const ProofNode& n);
std::size_t count_nodes(const ProofNode& n, NodeKind k);
/// Indented rendering; with `trace` ripple and rewrite steps are listed.
std::string render_tree(const ProofNode& n, bool trace);

struct ProveOptions {
    std::size_t simplify_bound = 200;
    std::size_t ripple_steps = 50;
    std::size_t induction_depth = 2;
};

struct ProofResult {
    ProofNode tree;
    bool closed = false;
    /// The conjecture followed by the goals that blocked successive nested
    /// step cases; the critic looks for divergence here.
    std::vector<Equation> history;
};

ProofResult prove(const Equation& conjecture, const Theory& th, const ProveOptions& opts = {});

/// Rewrites both sides to normal form; steps address `(= lhs rhs)`.
Equation simplify_equation(const Equation& eq, const std::vector<Rule>& rules, std::size_t bound,
                           std::vector<RewriteStep>* steps);

/// Wraps `tree` in lemma_use nodes, innermost last, one per entry.
struct LemmaProof {
    Rule lemma;
    std::optional<ProofNode> proof;  // none when assumed
};
ProofNode with_lemmas(ProofNode tree, const std::vector<LemmaProof>& lemmas);

}  // namespace rippling
