#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "valgroup/valuation.hpp"

namespace valgroup {

/// An integer-linear group term n*x + h with the free variable x and a
/// concrete offset h. For elementary abelian descriptors the coefficient is
/// kept in 0..p-1 (multiplication factors through the exponent).
struct GroupTerm {
    long long coeff_x = 0;
    GroupElement offset;

    static GroupTerm make(const GroupDescriptor& desc, long long coeff, GroupElement offset);
};

/// Quantifier-free one-free-variable formula over the atoms
///   v(t) <= v(s)   (ValueLeq, in the Γ order where Infinity is greatest)
///   v(t) = inf     (IsInf, i.e. t = 0)
///   R_m(v(t))      (Rm; false at Infinity)
/// closed under !, &, |. Immutable; subtrees are shared.
class Formula {
public:
    enum class Op { Atom, Not, And, Or };
    enum class AtomKind { ValueLeq, IsInf, Rm };

    struct Node {
        Op op = Op::Atom;
        AtomKind atom = AtomKind::IsInf;
        long long rm_bound = 0;
        std::vector<GroupTerm> terms; // 1 (IsInf, Rm) or 2 (ValueLeq)
        std::shared_ptr<const Node> lhs, rhs;
    };

    static Formula value_leq(const GroupDescriptor& desc, GroupTerm t, GroupTerm s);
    static Formula is_inf(const GroupDescriptor& desc, GroupTerm t);
    static Formula r_m(const GroupDescriptor& desc, long long m, GroupTerm t);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);

    const Node& root() const { return *root_; }
    const std::shared_ptr<const Node>& root_ptr() const { return root_; }
    const GroupDescriptor& descriptor() const { return desc_; }

    /// Canonical printing in the input grammar; parse(print(f)) == f.
    std::string print() const;

private:
    Formula(GroupDescriptor desc, std::shared_ptr<const Node> root)
        : desc_(std::move(desc)), root_(std::move(root)) {}

    GroupDescriptor desc_;
    std::shared_ptr<const Node> root_;
};

using ParamEnv = std::map<std::string, GroupElement>;

/// Parse error with a character position.
class FormulaParseError : public std::runtime_error {
public:
    FormulaParseError(std::size_t position, const std::string& message)
        : std::runtime_error("position " + std::to_string(position) + ": " + message),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Grammar (see README): terms are integer-linear combinations of `x`,
/// tuple literals `q(a,den; ...)`, basis literals `e(level,slot)` and named
/// parameters `p<name>`; atoms `v(T) <= v(S)` (also >=, <, >, =),
/// `v(T) = inf`, `R_m(v(T))`, and term equations `T = S`; connectives
/// `!`, `&`, `|` with parentheses.
Formula parse_formula(std::string_view text, const GroupDescriptor& desc,
                      const ParamEnv& params = {}, std::vector<std::string>* notes = nullptr);

/// Parses a parameter literal (a term without the free variable), e.g.
/// "q(1,4)" or "e(0,0) + e(1,1)".
GroupElement parse_element(std::string_view text, const GroupDescriptor& desc);

/// Truth of φ at the point a, by direct computation of every atom.
bool eval_point(const Formula& phi, const GroupElement& a, const FiltrationSpec& spec);

/// Brute-force oracle: {a in G_K : φ(a)}.
std::vector<GroupElement> extension(const Formula& phi, const FiltrationSpec& spec, int K);

/// The one-variable condition over Γ obtained from the normal-form rewrite
/// v(n_i x + h_i) -> f_{n_i}(v(x)) (valid outside the exceptional set X and
/// the prefix region), together with X itself.
class ReducedFormula {
public:
    const std::vector<GroupElement>& exceptional_set() const { return exceptional_; }
    /// Truth of the condition at Level(k); nullopt when some needed f value
    /// is not well-defined at this level (possible only in the prefix region).
    std::optional<bool> eval_at_level(int k) const;
    std::string render() const;

    /// Max p-adic valuation over x-coefficients; 0 when none.
    int max_coeff_valuation() const { return max_nu_; }
    /// Max level among nonzero offsets; 0 when none.
    int max_offset_level() const { return max_offset_level_; }
    /// Eventual shift of f_p (0 for elementary abelian specs).
    int shift() const { return shift_; }

private:
    explicit ReducedFormula(FiltrationSpec spec) : spec_(std::move(spec)) {}

    friend ReducedFormula reduce(const Formula&, const FiltrationSpec&);
    friend class ReducedEvaluator;

    FiltrationSpec spec_;
    std::shared_ptr<const Formula::Node> root_;
    std::vector<GroupElement> exceptional_;
    int max_nu_ = 0;
    int max_offset_level_ = 0;
    int shift_ = 0;
    int regime_floor_ = 0; // from here on the shift arithmetic is verified
};

ReducedFormula reduce(const Formula& phi, const FiltrationSpec& spec);

struct ReductionTrace {
    std::vector<GroupElement> exceptional_set; // X
    int safe_horizon = 0;                      // K*
    bool eventual_truth = false;
    std::string reduced_condition;
};

/// Exact finite/cofinite classification of the set φ defines.
struct Verdict {
    enum class Kind { Finite, Cofinite };
    Kind kind = Kind::Finite;
    /// Members (Finite) or the complement (Cofinite); canonical order.
    std::vector<GroupElement> elements;
    ReductionTrace trace;

    bool is_member(const GroupElement& x) const;
};

/// Decides whether φ defines a finite or a co-finite subset and materializes
/// the witness list. Throws EventualNotConstantError when the reduced
/// condition is not eventually constant (the set is neither finite nor
/// co-finite), SpecIntegrityError for broken filtrations.
Verdict classify(const Formula& phi, const FiltrationSpec& spec);

struct FormulaGenOptions {
    int max_abs_coeff = 8;
    int param_truncation = 6;
    int max_depth = 4;
};

/// Deterministic sample from G_K (uniform over the truncation).
GroupElement random_element(std::mt19937_64& rng, const FiltrationSpec& spec, int K);

/// Deterministic random quantifier-free formula for corroboration runs.
Formula random_formula(std::mt19937_64& rng, const FiltrationSpec& spec,
                       const FormulaGenOptions& opts = {});

} // namespace valgroup
