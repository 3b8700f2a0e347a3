#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rippling {

enum class SymbolKind { function, constructor, defined };

struct Symbol {
    std::string name;
    int arity = 0;
    SymbolKind kind = SymbolKind::function;
};

/// Raised for malformed input text or ill-formed terms. `offset` is the
/// character position in the input when known.
class TermError : public std::runtime_error {
public:
    explicit TermError(const std::string& what, std::size_t offset = npos)
        : std::runtime_error(what), offset_(offset) {}

    std::size_t offset() const { return offset_; }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t offset_;
};

/// Symbols and declared variable names. With `auto_declare` set, unknown
/// heads and bare lowercase identifiers become fresh function symbols whose
/// arity is fixed by their first use.
class SymbolTable {
public:
    bool auto_declare = false;

    void declare(const Symbol& s);
    void declare_var(const std::string& name) { vars_.insert(name); }

    const Symbol* find(std::string_view name) const;
    bool is_declared_var(std::string_view name) const;
    bool is_variable_name(std::string_view name) const;

    const std::map<std::string, Symbol, std::less<>>& symbols() const { return symbols_; }

private:
    std::map<std::string, Symbol, std::less<>> symbols_;
    std::set<std::string, std::less<>> vars_;
};

/// 1-based child indices from the root.
using Position = std::vector<int>;

std::string format_position(const Position& p);

/// Immutable first-order term. Copies share structure.
class Term {
public:
    Term() = default;

    static Term var(std::string name);
    static Term app(std::string head, std::vector<Term> args = {});

    bool is_var() const { return node_->is_var; }
    bool is_app() const { return !node_->is_var; }
    bool is_constant() const { return is_app() && node_->args.empty(); }
    const std::string& name() const { return node_->name; }
    const std::vector<Term>& args() const { return node_->args; }
    std::size_t arity() const { return node_->args.size(); }
    const Term& arg(std::size_t i) const { return node_->args[i]; }
    /// Node count.
    std::size_t size() const { return node_->size; }
    std::size_t depth() const { return node_->depth; }
    bool valid() const { return node_ != nullptr; }

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
    static int compare(const Term& a, const Term& b);

private:
    struct Node {
        bool is_var = false;
        std::string name;
        std::vector<Term> args;
        std::size_t size = 1;
        std::size_t depth = 0;
    };
    std::shared_ptr<const Node> node_;
};

std::string format_term(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

Term parse_term(std::string_view text, SymbolTable& symtab);

struct Equation {
    Term lhs;
    Term rhs;

    /// The equation viewed as the term `(= lhs rhs)`, so that positions
    /// can address either side.
    Term as_term() const { return Term::app("=", {lhs, rhs}); }
    static Equation from_term(const Term& t);

    friend bool operator==(const Equation& a, const Equation& b) {
        return a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

std::string format_equation(const Equation& e);
/// Accepts `L = R` or `(= L R)`.
Equation parse_equation(std::string_view text, SymbolTable& symtab);

// Positions

bool valid_position(const Term& t, const Position& p);
const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& u);
/// Preorder (leftmost-outermost) list of every position in t.
std::vector<Position> positions(const Term& t);

std::set<std::string> variables(const Term& t);
void collect_variables(const Term& t, std::vector<std::string>& ordered);
bool occurs(const std::string& var, const Term& t);

// Substitutions

class Substitution {
public:
    using Map = std::map<std::string, Term>;

    Substitution() = default;
    explicit Substitution(Map m) : map_(std::move(m)) {}

    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }
    const Map& bindings() const { return map_; }
    const Term* find(const std::string& v) const;
    void bind(const std::string& v, Term t) { map_[v] = std::move(t); }

    /// Resolve chains so no bound variable occurs in any binding's range.
    void normalize();
    bool idempotent() const;

    friend bool operator==(const Substitution& a, const Substitution& b) { return a.map_ == b.map_; }
    friend bool operator<(const Substitution& a, const Substitution& b);

private:
    Map map_;
};

std::string format_subst(const Substitution& s);

Term apply_subst(const Substitution& s, const Term& t);

/// Names treated as constants by matching and unification.
using VarSet = std::set<std::string>;

std::optional<Substitution> match_first_order(const Term& pattern, const Term& target,
                                              const VarSet& rigid = {});
/// Extend `s` so that pattern matches target; false on failure.
bool match_into(const Term& pattern, const Term& target, Substitution& s, const VarSet& rigid = {});

/// Most general unifier with occurs check; variables in `rigid` are constants.
std::optional<Substitution> unify_first_order(const Term& s, const Term& t,
                                              const VarSet& rigid = {});

/// Renames the variables of t that clash with `avoid` to fresh names.
Substitution rename_apart(const Term& t, const std::set<std::string>& avoid);

}  // namespace rippling
