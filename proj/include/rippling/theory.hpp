#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rippling/ripple.hpp"
#include "rippling/term.hpp"

namespace rippling {

class TheoryError : public std::runtime_error {
public:
    TheoryError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

struct Constructor {
    std::string name;
    std::vector<std::string> arg_sorts;
};

struct Datatype {
    std::string name;
    std::vector<Constructor> constructors;
};

/// A named oriented equation.
struct Rule {
    std::string name;
    Equation eq;
};

enum class LemmaStatus { unproved, proved, assumed };
const char* to_string(LemmaStatus s);

struct Lemma {
    Rule rule;
    LemmaStatus status = LemmaStatus::unproved;
};

struct Signature {
    std::vector<std::string> arg_sorts;  // empty string: unknown
    std::string result;
};

class Theory {
public:
    SymbolTable symbols;
    std::vector<Datatype> datatypes;
    std::map<std::string, std::string> var_sorts;  // declared variables
    std::vector<std::string> var_order;             // declaration order
    std::vector<Rule> definitions;
    std::vector<Lemma> lemmas;
    std::vector<Rule> conjectures;
    std::map<std::string, Signature> signatures;

    const Datatype* datatype(const std::string& sort) const;
    /// Datatype and constructor for a constructor symbol.
    std::optional<std::pair<const Datatype*, const Constructor*>> constructor(const std::string& name) const;
    bool is_defined(const std::string& symbol) const;
    /// Sort of t, or empty when it cannot be inferred.
    std::string sort_of(const Term& t) const;
    /// Sorts of the variables of t: declared ones, else inferred from the
    /// argument positions they occupy.
    std::map<std::string, std::string> variable_sorts(const Term& t) const;

    const Rule* find_conjecture(const std::string& name) const;
    const Lemma* find_lemma(const std::string& name) const;
    Lemma* find_lemma(const std::string& name);

    /// Definitions followed by proved or assumed lemmas, in file order.
    std::vector<Rule> rewrite_rules() const;
    /// Wave rules derived from rewrite_rules(), in the same order.
    std::vector<WaveRule> wave_rules() const;

    /// Adds a lemma (declared in the symbol table already) with a status.
    void add_lemma(const Rule& r, LemmaStatus s);

    /// Recomputes signatures of defined functions from their equations.
    void infer_signatures();
};

Theory parse_theory(std::string_view text);
Theory load_theory(const std::string& path);

/// Problems with arities, constructor coverage or definition orientation;
/// empty when the theory is sound.
std::vector<std::string> check_theory(const Theory& th);

struct RewriteStep {
    std::string rule;
    Equation eq;
    Position position;
    Substitution subst;
    Term before;
    Term after;
};

class BoundExceeded : public std::runtime_error {
public:
    explicit BoundExceeded(std::size_t bound)
        : std::runtime_error("rewriting did not terminate within " + std::to_string(bound) + " steps") {}
};

enum class Strategy { leftmost_innermost, leftmost_outermost };

/// Rewrites to normal form, recording every step.
Term simplify(const Term& t, const std::vector<Rule>& rules, std::size_t bound, std::vector<RewriteStep>* steps = nullptr,
              Strategy strategy = Strategy::leftmost_innermost);

std::string format_rewrite_step(const RewriteStep& s);

}  // namespace rippling
