#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rippling/annotation.hpp"
#include "rippling/prover.hpp"
#include "rippling/theory.hpp"

namespace rippling {

/// A wavefront found by difference matching one goal against the next.
/// `context` is its material with the hole written as the variable `_`.
struct FrontLayer {
    std::size_t pair = 0;  // index i of the pair (g_i, g_i+1)
    Position position;     // in the term (= lhs rhs) of g_i+1
    Term context;
    Position hole;         // relative to position
};

/// Fronts in consecutive pairs, each nested in or sitting at the place of
/// the previous one, with the same context up to variable renaming.
struct FrontChain {
    std::vector<FrontLayer> layers;
};

struct MatchedPair {
    Equation from, to;
    std::optional<AnnTerm> annotated;  // (= lhs rhs) of `to`, if a match exists
    std::vector<FrontLayer> fronts;    // single-hole fronts of `annotated`
};

struct DivergenceReport {
    std::vector<Equation> goals;
    std::vector<MatchedPair> pairs;
    std::size_t start = 0;            // first pair of the accumulating chains
    std::vector<FrontChain> chains;   // every chain of maximal evidence from `start`
    std::size_t evidence = 0;         // number of confirming pairs
};

/// Single-hole wavefronts of an annotated goal, in preorder.
std::vector<FrontLayer> front_layers(const AnnTerm& goal, std::size_t pair);

/// Divergence needs two consecutive confirming pairs, so at least three goals.
std::optional<DivergenceReport> detect_divergence(const std::vector<Equation>& goals);

enum class CandidateStatus { speculated, refuted, proved, assumed, failed };
const char* to_string(CandidateStatus s);

struct LemmaCandidate {
    Equation eq;
    std::vector<std::pair<Term, std::string>> generalized;  // ground subterm -> variable
    bool admissible = false;                                 // yields a wave rule
    CandidateStatus status = CandidateStatus::speculated;
    std::string note;
};

/// Lemmas that move one accumulated context layer outward past the function
/// it blocks, best first.
std::vector<LemmaCandidate> propose_lemma(const DivergenceReport& report, const Theory& th);

/// Ground values: constructor terms of depth at most `depth` (lists up to
/// length 4, naturals up to 4 by default), `elements` constants for sorts
/// without constructors.
struct GroundBounds {
    std::size_t depth = 5;
    std::size_t elements = 2;
    std::size_t domain_cap = 64;
    std::size_t max_instances = 20000;
};

/// A ground instance on which the two sides normalize differently.
std::optional<Substitution> counterexample(const Equation& eq, const Theory& th, const GroundBounds& b = {});

struct CriticOptions {
    ProveOptions prove;
    std::size_t depth = 1;
    GroundBounds bounds;
};

struct CriticResult {
    ProofResult result;
    std::optional<DivergenceReport> report;
    std::vector<LemmaCandidate> candidates;
    std::vector<LemmaProof> installed;
};

/// Proves the conjecture; on failure speculates lemmas from the divergence,
/// proves the first viable one and retries with it.
CriticResult patch_and_retry(const Equation& conjecture, const Theory& th, const CriticOptions& opts = {});

std::string format_report(const DivergenceReport& r);

}  // namespace rippling
