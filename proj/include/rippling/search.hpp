#pragma once

// Left-first search over binary choice trees.
//
// Leaves are visited in nondecreasing order of the number of left branches
// on their path. Within one left-count level the order is that of a
// depth-first traversal taking the right child before the left child. The
// tree is expanded in memory: each level keeps the left children it
// deferred in a frontier that seeds the next level.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rippling::search {

enum class Dir : char { L = 'L', R = 'R' };

template <class Value>
struct Leaf {
    Value value;
};

template <class State>
struct Branch {
    State left;
    State right;
};

template <class State, class Value>
using Expansion = std::variant<Leaf<Value>, Branch<State>>;

template <class State, class Value>
struct ChoiceTree {
    State root;
    std::function<Expansion<State, Value>(const State&)> expand;
    std::size_t max_depth = 64;
};

template <class Value>
struct LeafVisit {
    Value value;
    std::vector<Dir> path;
    std::size_t left_count = 0;
};

class DepthExceeded : public std::runtime_error {
public:
    explicit DepthExceeded(std::size_t bound)
        : std::runtime_error("choice tree exceeds depth bound " + std::to_string(bound)) {}
};

inline std::string format_path(const std::vector<Dir>& p) {
    std::string s;
    for (Dir d : p) s += static_cast<char>(d);
    return s;
}

/// Streams leaves to `visit` in left-first order. `visit` returns false to
/// stop the search; the function returns false iff it was stopped.
template <class State, class Value, class Visitor>
bool lfs_visit(const ChoiceTree<State, Value>& tree, Visitor&& visit) {
    struct Pending {
        State state;
        std::vector<Dir> path;
    };
    std::vector<Pending> level{{tree.root, {}}};
    for (std::size_t left_count = 0; !level.empty(); ++left_count) {
        std::vector<Pending> deferred;
        for (auto& start : level) {
            // Depth-first, right child first; left children wait a level.
            std::vector<Pending> stack;
            stack.push_back(std::move(start));
            while (!stack.empty()) {
                Pending cur = std::move(stack.back());
                stack.pop_back();
                if (cur.path.size() > tree.max_depth) throw DepthExceeded(tree.max_depth);
                auto e = tree.expand(cur.state);
                if (auto* leaf = std::get_if<Leaf<Value>>(&e)) {
                    LeafVisit<Value> v{std::move(leaf->value), std::move(cur.path), left_count};
                    if (!visit(std::move(v))) return false;
                    continue;
                }
                auto& br = std::get<Branch<State>>(e);
                if (cur.path.size() + 1 > tree.max_depth) throw DepthExceeded(tree.max_depth);
                auto lp = cur.path;
                lp.push_back(Dir::L);
                deferred.push_back({std::move(br.left), std::move(lp)});
                cur.path.push_back(Dir::R);
                stack.push_back({std::move(br.right), std::move(cur.path)});
            }
        }
        // Frontier entries root disjoint subtrees, so ordering them by path
        // with R before L restores depth-first order across the level.
        std::sort(deferred.begin(), deferred.end(), [](const Pending& a, const Pending& b) {
            return std::lexicographical_compare(a.path.begin(), a.path.end(), b.path.begin(), b.path.end(),
                                                [](Dir x, Dir y) { return x == Dir::R && y == Dir::L; });
        });
        level = std::move(deferred);
    }
    return true;
}

template <class State, class Value>
std::vector<LeafVisit<Value>> lfs(const ChoiceTree<State, Value>& tree) {
    std::vector<LeafVisit<Value>> out;
    lfs_visit(tree, [&](LeafVisit<Value> v) {
        out.push_back(std::move(v));
        return true;
    });
    return out;
}

/// First leaf in left-first order satisfying `accept`; it has the fewest
/// left branches among accepted leaves.
template <class State, class Value, class Pred>
std::optional<LeafVisit<Value>> lfs_first(const ChoiceTree<State, Value>& tree, Pred&& accept) {
    std::optional<LeafVisit<Value>> found;
    lfs_visit(tree, [&](LeafVisit<Value> v) {
        if (!accept(v.value)) return true;
        found = std::move(v);
        return false;
    });
    return found;
}

}  // namespace rippling::search
