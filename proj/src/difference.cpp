#include "rippling/difference.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "rippling/search.hpp"

namespace rippling {

std::string format_dmatch(const DMatch& m) {
    return format_annotated(m.annotated_target) + "  subst " + format_subst(m.subst) + "  cost " +
           std::to_string(m.cost());
}

std::string format_dunifier(const DUnifier& u) {
    return format_annotated(u.annotated_left) + "  ~  " + format_annotated(u.annotated_right) + "  subst " +
           format_subst(u.subst) + "  cost " + std::to_string(u.annotation_cost);
}

VarSet default_rigid(const Term&, const Term& target) { return variables(target); }

// ---------------------------------------------------------------------------
// Enumeration of well-formed annotations

namespace {

std::vector<Term> product_apply(const std::string& head, const std::vector<std::vector<Term>>& choices) {
    std::set<Term> out;
    std::vector<std::vector<Term>> partial{{}};
    for (const auto& c : choices) {
        std::vector<std::vector<Term>> next;
        for (const auto& p : partial)
            for (const auto& m : c) {
                auto q = p;
                q.push_back(m);
                next.push_back(std::move(q));
            }
        partial = std::move(next);
    }
    for (auto& args : partial) out.insert(Term::app(head, std::move(args)));
    return {out.begin(), out.end()};
}

// One way of annotating a subtree that lies in wavefront material.
struct MaterialOption {
    AnnTerm term;
    std::vector<Term> hole_skeletons;
    std::size_t holes = 0;
    std::size_t cost = 0;
};

class Annotator {
public:
    const std::vector<Annotation>& annotations(const Term& t) {
        auto it = ann_cache_.find(t);
        if (it != ann_cache_.end()) return it->second;
        std::vector<Annotation> out;
        if (t.is_var()) {
            out.push_back({AnnTerm::var(t.name()), {t}, 0});
        } else {
            // Unmarked root.
            std::vector<std::vector<Annotation>> kids;
            for (const auto& a : t.args()) kids.push_back(annotations(a));
            std::vector<std::pair<std::vector<const Annotation*>, std::size_t>> partial{{{}, 0}};
            for (const auto& k : kids) {
                std::vector<std::pair<std::vector<const Annotation*>, std::size_t>> next;
                for (const auto& [p, c] : partial)
                    for (const auto& a : k) {
                        auto q = p;
                        q.push_back(&a);
                        next.emplace_back(std::move(q), c + a.cost);
                    }
                partial = std::move(next);
            }
            for (const auto& [p, c] : partial) {
                std::vector<AnnTerm> args;
                std::vector<std::vector<Term>> sk;
                for (const Annotation* a : p) {
                    args.push_back(a->term);
                    sk.push_back(a->skeletons);
                }
                out.push_back({AnnTerm::app(t.name(), std::move(args)), product_apply(t.name(), sk), c});
            }
            // Wavefront at the root.
            if (t.arity() > 0) {
                for (auto& m : material_product(t)) {
                    if (m.holes == 0) continue;
                    std::sort(m.hole_skeletons.begin(), m.hole_skeletons.end());
                    m.hole_skeletons.erase(std::unique(m.hole_skeletons.begin(), m.hole_skeletons.end()),
                                           m.hole_skeletons.end());
                    out.push_back({m.term.with_front(true), std::move(m.hole_skeletons), m.cost + 1});
                }
            }
        }
        return ann_cache_.emplace(t, std::move(out)).first->second;
    }

    // Options for t's children when t itself is wavefront material; the
    // returned terms are t with those children (t's own marks unset).
    std::vector<MaterialOption> material_product(const Term& t) {
        std::vector<MaterialOption> acc{{AnnTerm(), {}, 0, 0}};
        std::vector<std::vector<AnnTerm>> acc_args{{}};
        for (const auto& a : t.args()) {
            const auto& opts = material(a);
            std::vector<MaterialOption> next;
            std::vector<std::vector<AnnTerm>> next_args;
            for (std::size_t i = 0; i < acc.size(); ++i)
                for (const auto& o : opts) {
                    MaterialOption m = acc[i];
                    m.hole_skeletons.insert(m.hole_skeletons.end(), o.hole_skeletons.begin(), o.hole_skeletons.end());
                    m.holes += o.holes;
                    m.cost += o.cost;
                    auto args = acc_args[i];
                    args.push_back(o.term);
                    next.push_back(std::move(m));
                    next_args.push_back(std::move(args));
                }
            acc = std::move(next);
            acc_args = std::move(next_args);
        }
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i].term = AnnTerm::app(t.name(), std::move(acc_args[i]));
        return acc;
    }

    const std::vector<MaterialOption>& material(const Term& t) {
        auto it = mat_cache_.find(t);
        if (it != mat_cache_.end()) return it->second;
        std::vector<MaterialOption> out;
        for (const auto& a : annotations(t)) out.push_back({a.term.with_hole(true), a.skeletons, 1, a.cost});
        if (t.is_var()) {
            out.push_back({AnnTerm::var(t.name()), {}, 0, 1});
        } else {
            for (auto& m : material_product(t)) {
                m.cost += 1;
                out.push_back(std::move(m));
            }
        }
        return mat_cache_.emplace(t, std::move(out)).first->second;
    }

private:
    std::map<Term, std::vector<Annotation>> ann_cache_;
    std::map<Term, std::vector<MaterialOption>> mat_cache_;
};

}  // namespace

std::vector<Annotation> all_annotations(const Term& t) {
    Annotator a;
    return a.annotations(t);
}

// ---------------------------------------------------------------------------
// Difference matching by structural recursion

namespace {

using MatchSet = std::set<std::pair<Substitution, AnnTerm>>;

class DiffMatcher {
public:
    DiffMatcher(const VarSet& rigid) : rigid_(rigid) {}

    bool flexible(const Term& p) const { return p.is_var() && !rigid_.count(p.name()); }

    // (σ', A) with A annotating t, root not a hole, σ'(p) a skeleton of A.
    MatchSet match(const Term& p, const Term& t, const Substitution& s) {
        MatchSet out;
        if (flexible(p)) {
            const Term* bound = s.find(p.name());
            for (const auto& a : ann_.annotations(t))
                for (const auto& sk : a.skeletons) {
                    if (bound && *bound != sk) continue;
                    Substitution s2 = s;
                    s2.bind(p.name(), sk);
                    out.emplace(std::move(s2), a.term);
                }
            return out;
        }
        // Root kept as skeleton.
        if (p.is_var()) {
            if (t.is_var() && t.name() == p.name()) out.emplace(s, AnnTerm::var(t.name()));
        } else if (t.is_app() && t.name() == p.name() && t.arity() == p.arity()) {
            std::vector<std::pair<Substitution, std::vector<AnnTerm>>> partial{{s, {}}};
            for (std::size_t i = 0; i < t.arity() && !partial.empty(); ++i) {
                std::vector<std::pair<Substitution, std::vector<AnnTerm>>> next;
                for (const auto& [sp, args] : partial)
                    for (const auto& [s2, a] : match(p.arg(i), t.arg(i), sp)) {
                        auto q = args;
                        q.push_back(a);
                        next.emplace_back(s2, std::move(q));
                    }
                partial = std::move(next);
            }
            for (auto& [sp, args] : partial) out.emplace(sp, AnnTerm::app(t.name(), std::move(args)));
        }
        // Root hidden in a wavefront, with one hole designated to carry p.
        if (t.is_app() && t.arity() > 0) {
            for (auto& [sp, body] : designated_product(p, t, s)) out.emplace(sp, body.with_front(true));
        }
        return out;
    }

private:
    // t as wavefront material with exactly one designated hole matching p
    // somewhere below it; t's own marks unset.
    std::vector<std::pair<Substitution, AnnTerm>> designated_product(const Term& p, const Term& t,
                                                                     const Substitution& s) {
        std::vector<std::pair<Substitution, AnnTerm>> out;
        for (std::size_t d = 0; d < t.arity(); ++d) {
            auto designated = designated_material(p, t.arg(d), s);
            if (designated.empty()) continue;
            // Other children: any material annotation.
            std::vector<std::vector<AnnTerm>> rest{{}};
            for (std::size_t i = 0; i < t.arity(); ++i) {
                if (i == d) continue;
                std::vector<std::vector<AnnTerm>> next;
                for (const auto& r : rest)
                    for (const auto& o : ann_.material(t.arg(i))) {
                        auto q = r;
                        q.push_back(o.term);
                        next.push_back(std::move(q));
                    }
                rest = std::move(next);
            }
            for (const auto& [sd, ad] : designated)
                for (const auto& r : rest) {
                    std::vector<AnnTerm> args;
                    std::size_t k = 0;
                    for (std::size_t i = 0; i < t.arity(); ++i) args.push_back(i == d ? ad : r[k++]);
                    out.emplace_back(sd, AnnTerm::app(t.name(), std::move(args)));
                }
        }
        return out;
    }

    std::vector<std::pair<Substitution, AnnTerm>> designated_material(const Term& p, const Term& t,
                                                                      const Substitution& s) {
        std::vector<std::pair<Substitution, AnnTerm>> out;
        for (const auto& [sd, a] : match(p, t, s)) out.emplace_back(sd, a.with_hole(true));
        if (t.is_app())
            for (auto& e : designated_product(p, t, s)) out.push_back(std::move(e));
        return out;
    }

    const VarSet& rigid_;
    Annotator ann_;
};

bool dmatch_less(const DMatch& a, const DMatch& b) {
    std::size_t ca = a.cost(), cb = b.cost();
    if (ca != cb) return ca < cb;
    auto ma = annotation_marks(a.annotated_target), mb = annotation_marks(b.annotated_target);
    if (ma != mb) return ma < mb;
    if (a.subst != b.subst) return a.subst < b.subst;
    return a.annotated_target < b.annotated_target;
}

}  // namespace

std::vector<DMatch> dmatch_all(const Term& pattern, const Term& target, std::size_t cap) {
    return dmatch_all(pattern, target, cap, default_rigid(pattern, target));
}

std::vector<DMatch> dmatch_all(const Term& pattern, const Term& target, std::size_t cap, const VarSet& rigid) {
    DiffMatcher m(rigid);
    std::vector<DMatch> out;
    for (auto& [s, a] : m.match(pattern, target, Substitution{})) {
        Substitution restricted;
        for (const auto& v : variables(pattern))
            if (const Term* b = s.find(v)) restricted.bind(v, *b);
        out.push_back({std::move(restricted), a});
    }
    std::sort(out.begin(), out.end(), dmatch_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() > cap) out.resize(cap);
    return out;
}

// ---------------------------------------------------------------------------
// Linear-time single match

namespace {

thread_local std::size_t g_visits = 0;

struct Flat {
    std::vector<const Term*> nodes;
    std::vector<std::vector<std::size_t>> kids;

    std::size_t add(const Term& t) {
        std::size_t id = nodes.size();
        nodes.push_back(&t);
        kids.emplace_back();
        for (const auto& a : t.args()) {
            std::size_t k = add(a);
            kids[id].push_back(k);
        }
        return id;
    }
};

class FirstMatcher {
public:
    FirstMatcher(const Term& p, const Term& t, const VarSet& rigid) : rigid_(rigid) {
        pat_.add(p);
        tgt_.add(t);
        memo_.assign(pat_.nodes.size() * tgt_.nodes.size(), -1);
    }

    bool embeds(std::size_t pi, std::size_t ti) {
        signed char& m = memo_[pi * tgt_.nodes.size() + ti];
        if (m >= 0) return m != 0;
        ++g_visits;
        bool r = root_match(pi, ti);
        if (!r)
            for (std::size_t k : tgt_.kids[ti])
                if (embeds(pi, k)) {
                    r = true;
                    break;
                }
        m = r ? 1 : 0;
        return r;
    }

    bool root_match(std::size_t pi, std::size_t ti) {
        const Term& p = *pat_.nodes[pi];
        const Term& t = *tgt_.nodes[ti];
        if (p.is_var()) return !rigid_.count(p.name()) || (t.is_var() && t.name() == p.name());
        if (t.is_var() || p.name() != t.name() || p.arity() != t.arity()) return false;
        for (std::size_t k = 0; k < p.arity(); ++k)
            if (!embeds(pat_.kids[pi][k], tgt_.kids[ti][k])) return false;
        return true;
    }

    // Builds an annotation of target node ti whose root matches pattern node pi.
    std::optional<AnnTerm> build_root(std::size_t pi, std::size_t ti, Substitution& s) {
        ++g_visits;
        const Term& p = *pat_.nodes[pi];
        const Term& t = *tgt_.nodes[ti];
        if (p.is_var()) {
            if (!rigid_.count(p.name())) {
                if (const Term* b = s.find(p.name()); b && *b != t) return std::nullopt;
                s.bind(p.name(), t);
            }
            return AnnTerm::plain(t);
        }
        std::vector<AnnTerm> args;
        for (std::size_t k = 0; k < p.arity(); ++k) {
            auto a = build(pat_.kids[pi][k], tgt_.kids[ti][k], s);
            if (!a) return std::nullopt;
            args.push_back(std::move(*a));
        }
        return AnnTerm::app(t.name(), std::move(args));
    }

    std::optional<AnnTerm> build(std::size_t pi, std::size_t ti, Substitution& s) {
        if (root_match(pi, ti)) return build_root(pi, ti, s);
        return build_front(pi, ti, s);
    }

    // Wavefront rooted at ti; the material is everything except the first
    // subterm (leftmost descent) whose root matches.
    std::optional<AnnTerm> build_front(std::size_t pi, std::size_t ti, Substitution& s) {
        ++g_visits;
        const Term& t = *tgt_.nodes[ti];
        for (std::size_t k = 0; k < tgt_.kids[ti].size(); ++k) {
            std::size_t c = tgt_.kids[ti][k];
            if (!embeds(pi, c)) continue;
            std::optional<AnnTerm> child;
            if (root_match(pi, c)) {
                auto inner = build_root(pi, c, s);
                if (!inner) return std::nullopt;
                child = inner->with_hole(true);
            } else {
                auto inner = build_front(pi, c, s);
                if (!inner) return std::nullopt;
                child = inner->with_front(false);
            }
            std::vector<AnnTerm> args;
            for (std::size_t j = 0; j < t.arity(); ++j)
                args.push_back(j == k ? *child : AnnTerm::plain(t.arg(j)));
            return AnnTerm::app(t.name(), std::move(args), true);
        }
        return std::nullopt;
    }

    // Backtracking variant for repeated pattern variables: same preference
    // order as build (root match first, then children left to right), but a
    // later alternative is tried when a binding clashes. Stops at the first
    // consistent choice.
    std::optional<AnnTerm> build_consistent(Substitution& s) {
        choice_.clear();
        std::vector<Goal> agenda{{0, 0, false}};
        if (!solve(agenda, s)) return std::nullopt;
        return assemble(0, 0, false);
    }

private:
    struct Goal {
        std::size_t pi, ti;
        bool in_front;
    };

    static std::size_t key(std::size_t pi, std::size_t ti) { return (pi << 32) ^ ti; }

    bool solve(std::vector<Goal>& agenda, Substitution& s) {
        if (agenda.empty()) return true;
        Goal g = agenda.back();
        agenda.pop_back();
        ++g_visits;
        const Term& p = *pat_.nodes[g.pi];
        const Term& t = *tgt_.nodes[g.ti];
        if (root_match(g.pi, g.ti)) {
            choice_[key(g.pi, g.ti)] = -1;
            if (p.is_var()) {
                const Term* b = rigid_.count(p.name()) ? nullptr : s.find(p.name());
                if (!b || *b == t) {
                    bool fresh = !rigid_.count(p.name()) && !b;
                    if (fresh) s.bind(p.name(), t);
                    if (solve(agenda, s)) return true;
                    if (fresh) unbind(s, p.name());
                }
            } else {
                std::size_t mark = agenda.size();
                for (std::size_t k = p.arity(); k-- > 0;) agenda.push_back({pat_.kids[g.pi][k], tgt_.kids[g.ti][k], false});
                if (solve(agenda, s)) return true;
                agenda.resize(mark);
            }
        }
        for (std::size_t k = 0; k < tgt_.kids[g.ti].size(); ++k) {
            std::size_t c = tgt_.kids[g.ti][k];
            if (!embeds(g.pi, c)) continue;
            choice_[key(g.pi, g.ti)] = static_cast<int>(k);
            agenda.push_back({g.pi, c, true});
            if (solve(agenda, s)) return true;
            agenda.pop_back();
        }
        agenda.push_back(g);
        return false;
    }

    static void unbind(Substitution& s, const std::string& v) {
        Substitution::Map m = s.bindings();
        m.erase(v);
        s = Substitution(std::move(m));
    }

    AnnTerm assemble(std::size_t pi, std::size_t ti, bool in_front) {
        const Term& t = *tgt_.nodes[ti];
        int c = choice_.at(key(pi, ti));
        if (c < 0) {
            const Term& p = *pat_.nodes[pi];
            AnnTerm out;
            if (p.is_var()) {
                out = AnnTerm::plain(t);
            } else {
                std::vector<AnnTerm> args;
                for (std::size_t k = 0; k < p.arity(); ++k) args.push_back(assemble(pat_.kids[pi][k], tgt_.kids[ti][k], false));
                out = AnnTerm::app(t.name(), std::move(args));
            }
            return in_front ? out.with_hole(true) : out;
        }
        std::vector<AnnTerm> args;
        for (std::size_t j = 0; j < t.arity(); ++j)
            args.push_back(static_cast<int>(j) == c ? assemble(pi, tgt_.kids[ti][j], true) : AnnTerm::plain(t.arg(j)));
        return AnnTerm::app(t.name(), std::move(args), !in_front);
    }

    const VarSet& rigid_;
    Flat pat_, tgt_;
    std::vector<signed char> memo_;
    std::map<std::size_t, int> choice_;
};

}  // namespace

std::size_t dmatch_first_visits() { return g_visits; }

std::optional<DMatch> dmatch_first(const Term& pattern, const Term& target) {
    return dmatch_first(pattern, target, default_rigid(pattern, target));
}

std::optional<DMatch> dmatch_first(const Term& pattern, const Term& target, const VarSet& rigid) {
    g_visits = 0;
    FirstMatcher fm(pattern, target, rigid);
    if (!fm.embeds(0, 0)) return std::nullopt;
    Substitution s;
    if (auto a = fm.build(0, 0, s)) return DMatch{std::move(s), std::move(*a)};
    // A repeated pattern variable bound inconsistently by the greedy descent.
    Substitution t;
    if (auto a = fm.build_consistent(t)) return DMatch{std::move(t), std::move(*a)};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Difference unification

namespace {

bool dunifier_less(const DUnifier& a, const DUnifier& b) {
    if (a.annotation_cost != b.annotation_cost) return a.annotation_cost < b.annotation_cost;
    auto la = annotation_marks(a.annotated_left), lb = annotation_marks(b.annotated_left);
    if (la != lb) return la < lb;
    auto ra = annotation_marks(a.annotated_right), rb = annotation_marks(b.annotated_right);
    if (ra != rb) return ra < rb;
    if (a.subst != b.subst) return a.subst < b.subst;
    if (a.annotated_left != b.annotated_left) return a.annotated_left < b.annotated_left;
    return a.annotated_right < b.annotated_right;
}

}  // namespace

std::vector<DUnifier> dunify(const Term& s, const Term& t, std::size_t cap, const VarSet& rigid) {
    Annotator ann;
    auto left = ann.annotations(s);
    auto right = ann.annotations(t);
    auto by_cost = [](const Annotation& a, const Annotation& b) { return a.cost < b.cost; };
    std::stable_sort(left.begin(), left.end(), by_cost);
    std::stable_sort(right.begin(), right.end(), by_cost);
    const std::size_t max_cost = (left.empty() ? 0 : left.back().cost) + (right.empty() ? 0 : right.back().cost);

    std::vector<DUnifier> out;
    for (std::size_t level = 0; level <= max_cost && out.size() < cap; ++level) {
        std::vector<DUnifier> found;
        for (const auto& a : left) {
            if (a.cost > level) break;
            for (const auto& b : right) {
                if (a.cost + b.cost > level) break;
                if (a.cost + b.cost < level) continue;
                std::set<Substitution> seen;
                for (const auto& u : a.skeletons)
                    for (const auto& v : b.skeletons)
                        if (auto mgu = unify_first_order(u, v, rigid); mgu && seen.insert(*mgu).second)
                            found.push_back({*mgu, a.term, b.term, level});
            }
        }
        std::sort(found.begin(), found.end(), dunifier_less);
        out.insert(out.end(), found.begin(), found.end());
    }
    if (out.size() > cap) out.resize(cap);
    return out;
}

namespace {

// Each app node of either side (arity > 0) is either hidden or kept. A hidden
// node becomes a one-node wavefront whose children are all holes.
struct HideState {
    std::size_t next = 0;
    std::vector<bool> hidden;
};

AnnTerm hide_annotation(const Term& t, const std::set<Position>& hidden, Position& pos) {
    if (t.is_var()) return AnnTerm::var(t.name());
    const bool h = hidden.count(pos) > 0;
    std::vector<AnnTerm> args;
    for (std::size_t i = 0; i < t.arity(); ++i) {
        pos.push_back(static_cast<int>(i + 1));
        AnnTerm a = hide_annotation(t.arg(i), hidden, pos);
        pos.pop_back();
        args.push_back(h ? a.with_hole(true) : a);
    }
    return AnnTerm::app(t.name(), std::move(args), h);
}

void hideable(const Term& t, Position& pos, std::vector<Position>& out) {
    if (t.is_var() || t.arity() == 0) return;
    out.push_back(pos);
    for (std::size_t i = 0; i < t.arity(); ++i) {
        pos.push_back(static_cast<int>(i + 1));
        hideable(t.arg(i), pos, out);
        pos.pop_back();
    }
}

}  // namespace

std::optional<DUnifier> dunify_minimal(const Term& s, const Term& t, const VarSet& rigid) {
    std::vector<Position> ls, rs;
    Position pos;
    hideable(s, pos, ls);
    hideable(t, pos, rs);
    const std::size_t n = ls.size() + rs.size();

    search::ChoiceTree<HideState, std::vector<bool>> tree;
    tree.root = HideState{0, std::vector<bool>(n, false)};
    tree.max_depth = n;
    tree.expand = [n](const HideState& st) -> search::Expansion<HideState, std::vector<bool>> {
        if (st.next == n) return search::Leaf<std::vector<bool>>{st.hidden};
        HideState l = st, r = st;
        l.hidden[st.next] = true;
        ++l.next;
        ++r.next;
        return search::Branch<HideState>{std::move(l), std::move(r)};
    };

    auto build = [&](const std::vector<bool>& hidden) {
        std::set<Position> hl, hr;
        for (std::size_t i = 0; i < n; ++i)
            if (hidden[i]) (i < ls.size() ? hl.insert(ls[i]) : hr.insert(rs[i - ls.size()]));
        Position p1, p2;
        return std::make_pair(hide_annotation(s, hl, p1), hide_annotation(t, hr, p2));
    };
    auto solve = [&](const AnnTerm& a, const AnnTerm& b) -> std::optional<Substitution> {
        for (const auto& u : skeletons(a))
            for (const auto& v : skeletons(b))
                if (auto mgu = unify_first_order(u, v, rigid)) return mgu;
        return std::nullopt;
    };

    auto leaf = search::lfs_first(tree, [&](const std::vector<bool>& hidden) {
        auto [a, b] = build(hidden);
        return solve(a, b).has_value();
    });
    if (!leaf) return std::nullopt;
    auto [a, b] = build(leaf->value);
    auto mgu = solve(a, b);
    return DUnifier{*mgu, a, b, annotation_cost(a) + annotation_cost(b)};
}

}  // namespace rippling
