#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rippling/term.hpp"

namespace rippling {

/// A term whose nodes may carry wavefront and wavehole marks.
///
/// A node marked `front` starts a wavefront: its subtree, down to (but not
/// including) the nodes marked `hole`, is wavefront material. A hole node's
/// subtree belongs to the skeleton again and may itself start a nested
/// wavefront, so one node can carry both marks (`[{f [x]}]`).
class AnnTerm {
public:
    AnnTerm() = default;

    static AnnTerm var(std::string name, bool hole = false);
    static AnnTerm app(std::string head, std::vector<AnnTerm> args = {}, bool front = false, bool hole = false);
    /// Unannotated copy of a plain term.
    static AnnTerm plain(const Term& t);

    bool is_var() const { return node_->is_var; }
    bool is_app() const { return !node_->is_var; }
    const std::string& name() const { return node_->name; }
    const std::vector<AnnTerm>& args() const { return node_->args; }
    std::size_t arity() const { return node_->args.size(); }
    const AnnTerm& arg(std::size_t i) const { return node_->args[i]; }
    bool front() const { return node_->front; }
    bool hole() const { return node_->hole; }
    std::size_t size() const { return node_->size; }
    /// True if any node in the subtree carries a mark.
    bool annotated() const { return node_->annotated; }
    bool valid() const { return node_ != nullptr; }

    AnnTerm with_hole(bool h) const;
    AnnTerm with_front(bool f) const;
    AnnTerm with_args(std::vector<AnnTerm> args) const;

    friend bool operator==(const AnnTerm& a, const AnnTerm& b);
    friend bool operator!=(const AnnTerm& a, const AnnTerm& b) { return !(a == b); }
    friend bool operator<(const AnnTerm& a, const AnnTerm& b) { return compare(a, b) < 0; }
    static int compare(const AnnTerm& a, const AnnTerm& b);

private:
    struct Node {
        bool is_var = false;
        std::string name;
        std::vector<AnnTerm> args;
        bool front = false;
        bool hole = false;
        bool annotated = false;
        std::size_t size = 1;
    };
    static AnnTerm make(Node n);
    std::shared_ptr<const Node> node_;
};

std::string format_annotated(const AnnTerm& t);
/// Prints `(= L R)` as `L = R`.
std::string format_annotated_goal(const AnnTerm& t);
std::ostream& operator<<(std::ostream& os, const AnnTerm& t);

/// `{head args...}` is a wavefront, `[t]` a wavehole.
AnnTerm parse_annotated(std::string_view text, SymbolTable& symtab);
/// Accepts `L = R` or `(= L R)` with annotated sides; returns `(= L R)`.
AnnTerm parse_annotated_goal(std::string_view text, SymbolTable& symtab);

Term erase(const AnnTerm& t);

enum class WatViolation { none, hole_existence, nested_wavefront, stray_hole, variable_wavefront };

const char* to_string(WatViolation v);

struct WatReport {
    WatViolation violation = WatViolation::none;
    Position position;

    bool ok() const { return violation == WatViolation::none; }
    explicit operator bool() const { return ok(); }
};

WatReport check_wat(const AnnTerm& t);
inline bool is_wat(const AnnTerm& t) { return check_wat(t).ok(); }

/// Every way of replacing each wavefront by the skeleton of one of its holes.
std::set<Term> skeletons(const AnnTerm& t);

/// Number of wavefront nodes, not counting wavehole contents.
std::size_t annotation_cost(const AnnTerm& t);

/// Entry d is the total wavefront size of fronts whose skeleton depth is d.
/// Trailing zeros are trimmed, so an unannotated term has the empty vector.
struct Measure {
    std::vector<std::size_t> weights;

    friend bool operator==(const Measure&, const Measure&) = default;
};

Measure measure(const AnnTerm& t);
/// Lexicographic comparison reading from the deepest entry outwards.
bool measure_less(const Measure& a, const Measure& b);
std::string format_measure(const Measure& m);

// Positions on annotated terms mirror those on plain terms.

const AnnTerm& subterm_at(const AnnTerm& t, const Position& p);
AnnTerm replace_at(const AnnTerm& t, const Position& p, const AnnTerm& u);

/// Marked nodes in preorder: (position, 'F' | 'H' | 'B'), B meaning both.
std::vector<std::pair<Position, char>> annotation_marks(const AnnTerm& t);

/// Position of every wavefront root together with its hole positions
/// relative to that root.
struct FrontInfo {
    Position position;
    std::vector<Position> holes;
    std::size_t size = 0;
    std::size_t skeleton_depth = 0;
};
std::vector<FrontInfo> wavefronts(const AnnTerm& t);

}  // namespace rippling
