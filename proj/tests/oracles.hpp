#pragma once

// Brute-force reference implementations used only by tests. None of these
// call into the code paths they are used to check.

#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rippling/annotation.hpp"
#include "rippling/term.hpp"

namespace oracle {

using rippling::AnnTerm;
using rippling::Substitution;
using rippling::Term;
using rippling::VarSet;

/// Tries every assignment of target subterms to pattern variables.
std::optional<Substitution> match(const Term& pattern, const Term& target, const VarSet& rigid = {});

/// Independent well-formedness check over a flattened parent array.
bool is_wat(const AnnTerm& t);

/// Skeletons by repeatedly replacing an outermost wavefront by one of its holes.
std::set<Term> skeletons(const AnnTerm& t);

std::size_t cost(const AnnTerm& t);

/// Every assignment of front/hole bits to the nodes of t, filtered by is_wat.
std::vector<AnnTerm> all_wats(const Term& t);

struct MatchKey {
    Substitution subst;
    AnnTerm annotated;
    friend bool operator<(const MatchKey& a, const MatchKey& b) {
        if (a.subst != b.subst) return a.subst < b.subst;
        return a.annotated < b.annotated;
    }
    friend bool operator==(const MatchKey& a, const MatchKey& b) {
        return a.subst == b.subst && a.annotated == b.annotated;
    }
};

std::set<MatchKey> dmatch(const Term& pattern, const Term& target, const VarSet& rigid = {});

/// all_wats of one target with the skeletons of each, for reuse across patterns.
struct WatTable {
    std::vector<AnnTerm> wats;
    std::vector<std::set<Term>> skeletons;
};
WatTable wat_table(const Term& target);
std::set<MatchKey> dmatch(const Term& pattern, const WatTable& target, const VarSet& rigid = {});

struct UnifierKey {
    Substitution subst;
    AnnTerm left, right;
    friend bool operator<(const UnifierKey& a, const UnifierKey& b) {
        if (a.subst != b.subst) return a.subst < b.subst;
        if (a.left != b.left) return a.left < b.left;
        return a.right < b.right;
    }
    friend bool operator==(const UnifierKey& a, const UnifierKey& b) {
        return a.subst == b.subst && a.left == b.left && a.right == b.right;
    }
};

std::set<UnifierKey> dunify(const Term& s, const Term& t, const VarSet& rigid = {});

/// Least total annotation cost of a difference unifier, if any exists.
std::optional<std::size_t> dunify_min_cost(const Term& s, const Term& t, const VarSet& rigid = {});

// Random generation

struct Signature {
    std::vector<std::pair<std::string, int>> symbols;
    std::vector<std::string> vars;
};

/// All terms with at most `max_nodes` nodes, using variables if `with_vars`.
std::vector<Term> all_terms(const Signature& sig, std::size_t max_nodes, bool with_vars);

Term random_term(std::mt19937& rng, const Signature& sig, std::size_t max_nodes, double var_prob);

}  // namespace oracle
