#pragma once

#include <optional>
#include <string>

#include "valgroup/formula.hpp"

namespace valgroup {

struct CorroborationSummary {
    int trials = 0;
    int agreements = 0;
    int census_level = 0;
    unsigned long long seed = 0;
};

/// Minimality verdict for a filtration, per the schedule-level criteria:
/// the value set must have order type ω* with finite fibres (structural for
/// every well-formed spec), and the eventual regime must make every R_m
/// finite or co-finite — eventually constant jumps (cases 3a/4), or jumps
/// through every size only finitely often (case 3b, affine tails); Prüfer
/// products additionally need f_p to act as an exact eventual right shift.
struct ClassificationReport {
    enum class Verdict { Minimal, NotMinimal };
    enum class Case { C3a, C3b, C4, None };

    Verdict verdict = Verdict::NotMinimal;
    Case case_id = Case::None;
    std::optional<int> n0;  // eventual jump is p^(n0+1)
    std::optional<int> ell; // eventual shift of f_p (case 4)
    std::optional<int> violated_condition; // 1..4, NotMinimal only
    std::string witness_text;
    std::optional<std::string> witness_formula; // "R_m(v(x))" for R_m failures

    static const char* case_name(Case c) {
        switch (c) {
            case Case::C3a: return "3a";
            case Case::C3b: return "3b";
            case Case::C4: return "4";
            case Case::None: return "none";
        }
        return "none";
    }
};

ClassificationReport classify_spec(const FiltrationSpec& spec);

/// Runs `trials` random formulas through classify and the brute-force
/// extension oracle. Requires a Minimal spec. Any disagreement throws
/// InconsistencyError carrying the offending formula.
CorroborationSummary corroborate(const FiltrationSpec& spec, int trials,
                                 unsigned long long seed);

struct NonMinimalWitness {
    std::optional<Formula> formula; // R_m(v(x)) when the failure is an R_m one
    std::string description;
    /// Both the extension and its complement grew between the two truncations.
    bool verified_growth = false;
    int truncation_a = 0, truncation_b = 0;
    std::size_t members_a = 0, members_b = 0;
    std::size_t non_members_a = 0, non_members_b = 0;
};

/// Concrete witness for a NotMinimal spec; requires classify_spec(spec) to be
/// NotMinimal. R_m failures yield a formula whose extension is infinite and
/// co-infinite (verified at two truncations); structural failures yield a
/// description only.
NonMinimalWitness witness_nonminimal(const FiltrationSpec& spec);

} // namespace valgroup
