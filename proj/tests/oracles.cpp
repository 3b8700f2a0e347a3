#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace oracle {

using rippling::Position;

// ---------------------------------------------------------------------------

namespace {

void subterms(const Term& t, std::vector<Term>& out) {
    out.push_back(t);
    for (const auto& a : t.args()) subterms(a, out);
}

Term subst_apply(const std::map<std::string, Term>& m, const Term& t) {
    if (t.is_var()) {
        auto it = m.find(t.name());
        return it == m.end() ? t : it->second;
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(subst_apply(m, a));
    return Term::app(t.name(), args);
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& target, const VarSet& rigid) {
    std::vector<std::string> vars;
    for (const auto& v : rippling::variables(pattern))
        if (!rigid.count(v)) vars.push_back(v);
    std::vector<Term> cands;
    subterms(target, cands);
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
        std::map<std::string, Term> m;
        for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = cands[idx[i]];
        if (subst_apply(m, pattern) == target) return Substitution(Substitution::Map(m.begin(), m.end()));
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == cands.size()) idx[k++] = 0;
        if (k == idx.size()) return std::nullopt;
    }
}

// ---------------------------------------------------------------------------

namespace {

struct FlatNode {
    const AnnTerm* t;
    int parent;
};

void flatten(const AnnTerm& t, int parent, std::vector<FlatNode>& out) {
    out.push_back({&t, parent});
    int me = static_cast<int>(out.size()) - 1;
    for (const auto& a : t.args()) flatten(a, me, out);
}

}  // namespace

bool is_wat(const AnnTerm& t) {
    std::vector<FlatNode> n;
    flatten(t, -1, n);
    const std::size_t N = n.size();
    // owner[i]: index of the wavefront whose material contains node i, or -1.
    std::vector<int> owner(N, -1);
    for (std::size_t i = 0; i < N; ++i) {
        const AnnTerm& x = *n[i].t;
        if (x.front() && x.is_var()) return false;
        if (x.hole()) {
            if (n[i].parent < 0 || owner[n[i].parent] < 0) return false;
        } else if (x.front()) {
            if (n[i].parent >= 0 && owner[n[i].parent] >= 0) return false;
        }
        if (x.front())
            owner[i] = static_cast<int>(i);
        else if (x.hole())
            owner[i] = -1;
        else
            owner[i] = n[i].parent >= 0 ? owner[n[i].parent] : -1;
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (!n[i].t->front()) continue;
        bool has_hole = false;
        for (std::size_t j = i + 1; j < N && !has_hole; ++j)
            if (n[j].t->hole() && n[j].parent >= 0 && owner[n[j].parent] == static_cast<int>(i)) has_hole = true;
        if (!has_hole) return false;
    }
    return true;
}

namespace {

// Positions of wavefronts not inside any other wavefront's material or hole.
std::optional<Position> outermost_front(const AnnTerm& t, Position& pos) {
    if (t.front()) return pos;
    for (std::size_t i = 0; i < t.arity(); ++i) {
        pos.push_back(static_cast<int>(i + 1));
        auto r = outermost_front(t.arg(i), pos);
        pos.pop_back();
        if (r) return r;
    }
    return std::nullopt;
}

void holes_of(const AnnTerm& t, std::vector<AnnTerm>& out, bool root) {
    if (!root && t.hole()) {
        out.push_back(t.with_hole(false));
        return;
    }
    for (const auto& a : t.args()) holes_of(a, out, false);
}

AnnTerm put(const AnnTerm& t, const Position& p, std::size_t k, const AnnTerm& u) {
    if (k == p.size()) return u;
    std::vector<AnnTerm> args = t.args();
    args[p[k] - 1] = put(args[p[k] - 1], p, k + 1, u);
    return AnnTerm::app(t.name(), args, t.front(), t.hole());
}

Term strip(const AnnTerm& t) {
    if (t.is_var()) return Term::var(t.name());
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(strip(a));
    return Term::app(t.name(), args);
}

}  // namespace

std::set<Term> skeletons(const AnnTerm& t) {
    std::set<Term> out;
    std::vector<AnnTerm> work{t};
    while (!work.empty()) {
        AnnTerm cur = work.back();
        work.pop_back();
        Position pos;
        auto f = outermost_front(cur, pos);
        if (!f) {
            out.insert(strip(cur));
            continue;
        }
        AnnTerm front = cur;
        for (int i : *f) front = front.arg(i - 1);
        bool was_hole = front.hole();
        std::vector<AnnTerm> hs;
        holes_of(front, hs, true);
        for (const auto& h : hs) work.push_back(put(cur, *f, 0, h.with_hole(was_hole)));
    }
    return out;
}

std::size_t cost(const AnnTerm& t) {
    std::vector<FlatNode> n;
    flatten(t, -1, n);
    std::vector<bool> mat(n.size(), false);
    std::size_t c = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const AnnTerm& x = *n[i].t;
        if (x.hole())
            mat[i] = false;
        else if (x.front())
            mat[i] = true;
        else
            mat[i] = n[i].parent >= 0 && mat[n[i].parent];
        // A hole that also starts a front is material of that inner front.
        if (x.hole() && x.front()) mat[i] = true;
        if (mat[i]) ++c;
    }
    return c;
}

std::vector<AnnTerm> all_wats(const Term& t) {
    std::vector<Term> nodes;
    std::function<void(const Term&)> collect = [&](const Term& x) {
        nodes.push_back(x);
        for (const auto& a : x.args()) collect(a);
    };
    collect(t);
    const std::size_t N = nodes.size();
    std::vector<AnnTerm> out;
    std::vector<int> marks(N, 0);
    while (true) {
        std::size_t k = 0;
        std::function<AnnTerm(const Term&)> build = [&](const Term& x) -> AnnTerm {
            int m = marks[k++];
            bool f = m & 1, h = m & 2;
            if (x.is_var()) {
                if (f) return AnnTerm::app("#bad", {});
                return AnnTerm::var(x.name(), h);
            }
            std::vector<AnnTerm> args;
            for (const auto& a : x.args()) args.push_back(build(a));
            return AnnTerm::app(x.name(), args, f, h);
        };
        bool var_front = false;
        for (std::size_t i = 0; i < N; ++i)
            if ((marks[i] & 1) && nodes[i].is_var()) var_front = true;
        if (!var_front) {
            AnnTerm a = build(t);
            if (oracle::is_wat(a)) out.push_back(a);
        }
        std::size_t i = 0;
        while (i < N && ++marks[i] == 4) marks[i++] = 0;
        if (i == N) break;
    }
    return out;
}

WatTable wat_table(const Term& target) {
    WatTable t;
    t.wats = all_wats(target);
    for (const auto& a : t.wats) t.skeletons.push_back(oracle::skeletons(a));
    return t;
}

std::set<MatchKey> dmatch(const Term& pattern, const WatTable& target, const VarSet& rigid) {
    std::set<MatchKey> out;
    for (std::size_t i = 0; i < target.wats.size(); ++i)
        for (const auto& s : target.skeletons[i])
            if (auto m = match(pattern, s, rigid)) out.insert({*m, target.wats[i]});
    return out;
}

std::set<MatchKey> dmatch(const Term& pattern, const Term& target, const VarSet& rigid) {
    return dmatch(pattern, wat_table(target), rigid);
}

std::set<UnifierKey> dunify(const Term& s, const Term& t, const VarSet& rigid) {
    std::set<UnifierKey> out;
    auto ls = all_wats(s), rs = all_wats(t);
    for (const auto& a : ls) {
        auto sa = oracle::skeletons(a);
        for (const auto& b : rs)
            for (const auto& u : sa)
                for (const auto& v : oracle::skeletons(b))
                    if (auto mgu = rippling::unify_first_order(u, v, rigid)) out.insert({*mgu, a, b});
    }
    return out;
}

std::optional<std::size_t> dunify_min_cost(const Term& s, const Term& t, const VarSet& rigid) {
    auto ls = all_wats(s), rs = all_wats(t);
    std::vector<std::pair<std::size_t, std::set<Term>>> L, R;
    for (const auto& a : ls) L.emplace_back(oracle::cost(a), oracle::skeletons(a));
    for (const auto& b : rs) R.emplace_back(oracle::cost(b), oracle::skeletons(b));
    std::optional<std::size_t> best;
    for (const auto& [ca, sa] : L)
        for (const auto& [cb, sb] : R) {
            if (best && ca + cb >= *best) continue;
            bool ok = false;
            for (const auto& u : sa) {
                for (const auto& v : sb)
                    if (rippling::unify_first_order(u, v, rigid)) {
                        ok = true;
                        break;
                    }
                if (ok) break;
            }
            if (ok) best = ca + cb;
        }
    return best;
}

// ---------------------------------------------------------------------------

std::vector<Term> all_terms(const Signature& sig, std::size_t max_nodes, bool with_vars) {
    // by_size[n]: all terms with exactly n nodes.
    std::vector<std::vector<Term>> by_size(max_nodes + 1);
    for (std::size_t n = 1; n <= max_nodes; ++n) {
        for (const auto& [name, arity] : sig.symbols) {
            if (arity == 0) {
                if (n == 1) by_size[1].push_back(Term::app(name));
                continue;
            }
            // Distribute n-1 nodes across `arity` children.
            std::function<void(int, std::size_t, std::vector<Term>&)> go = [&](int i, std::size_t left,
                                                                                std::vector<Term>& acc) {
                if (i == arity) {
                    if (left == 0) by_size[n].push_back(Term::app(name, acc));
                    return;
                }
                for (std::size_t k = 1; k <= left; ++k)
                    for (const auto& c : by_size[k]) {
                        acc.push_back(c);
                        go(i + 1, left - k, acc);
                        acc.pop_back();
                    }
            };
            std::vector<Term> acc;
            if (n >= static_cast<std::size_t>(arity) + 1) go(0, n - 1, acc);
        }
        if (n == 1 && with_vars)
            for (const auto& v : sig.vars) by_size[1].push_back(Term::var(v));
    }
    std::vector<Term> out;
    for (const auto& b : by_size) out.insert(out.end(), b.begin(), b.end());
    return out;
}

Term random_term(std::mt19937& rng, const Signature& sig, std::size_t max_nodes, double var_prob) {
    std::uniform_real_distribution<double> u(0, 1);
    if (max_nodes <= 1 || u(rng) < 0.25) {
        if (!sig.vars.empty() && u(rng) < var_prob)
            return Term::var(sig.vars[std::uniform_int_distribution<std::size_t>(0, sig.vars.size() - 1)(rng)]);
        std::vector<std::string> consts;
        for (const auto& [n, a] : sig.symbols)
            if (a == 0) consts.push_back(n);
        return Term::app(consts[std::uniform_int_distribution<std::size_t>(0, consts.size() - 1)(rng)]);
    }
    std::vector<std::pair<std::string, int>> fns;
    for (const auto& s : sig.symbols)
        if (s.second > 0 && static_cast<std::size_t>(s.second) < max_nodes) fns.push_back(s);
    if (fns.empty()) return random_term(rng, sig, 1, var_prob);
    auto [name, arity] = fns[std::uniform_int_distribution<std::size_t>(0, fns.size() - 1)(rng)];
    std::size_t budget = max_nodes - 1;
    std::vector<Term> args;
    for (int i = 0; i < arity; ++i) {
        std::size_t share = std::max<std::size_t>(1, budget / static_cast<std::size_t>(arity - i));
        Term c = random_term(rng, sig, share, var_prob);
        budget -= std::min(budget, c.size());
        args.push_back(c);
    }
    return Term::app(name, args);
}

}  // namespace oracle
