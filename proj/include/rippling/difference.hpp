#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rippling/annotation.hpp"
#include "rippling/term.hpp"

namespace rippling {

constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();

/// A difference match: `subst` applied to the pattern is one of the
/// skeletons of `annotated_target`, which erases to the target.
struct DMatch {
    Substitution subst;
    AnnTerm annotated_target;

    std::size_t cost() const { return annotation_cost(annotated_target); }
    friend bool operator==(const DMatch& a, const DMatch& b) {
        return a.subst == b.subst && a.annotated_target == b.annotated_target;
    }
};

struct DUnifier {
    Substitution subst;
    AnnTerm annotated_left;
    AnnTerm annotated_right;
    std::size_t annotation_cost = 0;

    friend bool operator==(const DUnifier& a, const DUnifier& b) {
        return a.subst == b.subst && a.annotated_left == b.annotated_left && a.annotated_right == b.annotated_right;
    }
};

std::string format_dmatch(const DMatch& m);
std::string format_dunifier(const DUnifier& u);

/// Variables treated as constants when the caller gives no explicit set:
/// those of the target, which are object-level names shared with the pattern.
VarSet default_rigid(const Term& pattern, const Term& target);

/// Node visits made by the most recent dmatch_first call on this thread.
std::size_t dmatch_first_visits();

/// One difference match, found in time proportional to |target| for a fixed
/// pattern. Mismatched structure is hidden in single-hole wavefronts.
std::optional<DMatch> dmatch_first(const Term& pattern, const Term& target);
std::optional<DMatch> dmatch_first(const Term& pattern, const Term& target, const VarSet& rigid);

/// All difference matches, cheapest first, truncated to `cap`.
std::vector<DMatch> dmatch_all(const Term& pattern, const Term& target, std::size_t cap = unlimited);
std::vector<DMatch> dmatch_all(const Term& pattern, const Term& target, std::size_t cap, const VarSet& rigid);

/// All difference unifiers, cheapest first, truncated to `cap`.
std::vector<DUnifier> dunify(const Term& s, const Term& t, std::size_t cap = unlimited, const VarSet& rigid = {});

/// A difference unifier of least annotation cost, found by left-first
/// search where a left branch hides a node in a wavefront.
std::optional<DUnifier> dunify_minimal(const Term& s, const Term& t, const VarSet& rigid = {});

/// A well-formed annotation of a term together with its skeleton set.
struct Annotation {
    AnnTerm term;
    std::vector<Term> skeletons;
    std::size_t cost = 0;
};

/// Every well-formed annotation of t whose root is not a wavehole.
std::vector<Annotation> all_annotations(const Term& t);

}  // namespace rippling
