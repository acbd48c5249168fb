#include "valgroup/classifier.hpp"

#include <algorithm>
#include <sstream>

namespace valgroup {

namespace {

/// Jump exponents over one eventual period.
std::vector<int> eventual_jump_exponents(const FiltrationSpec& spec) {
    std::vector<int> out;
    const int pl = spec.prefix_length();
    for (int r = 0; r < spec.period_length(); ++r) out.push_back(spec.jump_exponent(pl + r));
    return out;
}

ClassificationReport not_minimal_rm(const FiltrationSpec& spec, int condition,
                                    const std::vector<int>& exponents) {
    ClassificationReport rep;
    rep.verdict = ClassificationReport::Verdict::NotMinimal;
    rep.case_id = ClassificationReport::Case::None;
    rep.violated_condition = condition;
    const int c_min = *std::min_element(exponents.begin(), exponents.end());
    const BigInt m = int_pow(spec.descriptor().prime, c_min);
    rep.witness_formula = "R_" + m.str() + "(v(x))";
    std::ostringstream os;
    os << "jump sizes over the eventual period are not constant; R_" << m.str()
       << " holds on infinitely many levels and fails on infinitely many";
    rep.witness_text = os.str();
    return rep;
}

ClassificationReport not_minimal_structural(int condition, std::string text) {
    ClassificationReport rep;
    rep.verdict = ClassificationReport::Verdict::NotMinimal;
    rep.case_id = ClassificationReport::Case::None;
    rep.violated_condition = condition;
    rep.witness_text = std::move(text);
    return rep;
}

} // namespace

ClassificationReport classify_spec(const FiltrationSpec& spec) {
    // Conditions (1) Γ of order type ω* and (2) finite fibres hold for every
    // well-formed filtration: levels strictly enlarge finite subgroups.
    const auto& desc = spec.descriptor();
    ClassificationReport rep;

    if (desc.kind == GroupKind::ElemAbelian) {
        if (spec.tail_kind() == FiltrationSpec::TailKind::Affine) {
            rep.verdict = ClassificationReport::Verdict::Minimal;
            rep.case_id = ClassificationReport::Case::C3b;
            return rep;
        }
        const auto exps = eventual_jump_exponents(spec);
        const bool constant = std::all_of(exps.begin(), exps.end(),
                                          [&](int e) { return e == exps.front(); });
        if (!constant) return not_minimal_rm(spec, 3, exps);
        rep.verdict = ClassificationReport::Verdict::Minimal;
        rep.case_id = ClassificationReport::Case::C3a;
        rep.n0 = exps.front() - 1; // R_{p^n0} holds, R_{p^(n0+1)} fails, co-finitely
        return rep;
    }

    const auto exps = eventual_jump_exponents(spec);
    const bool constant =
        std::all_of(exps.begin(), exps.end(), [&](int e) { return e == exps.front(); });
    if (!constant) return not_minimal_rm(spec, 4, exps);

    int ell = 0;
    try {
        ell = eventual_shift(spec);
    } catch (const SpecIntegrityError& e) {
        return not_minimal_structural(4, e.what());
    }
    // verify the shift over a window beyond the horizon
    const int h = spec.horizon();
    for (int k = h; k <= h + 10; ++k) {
        auto v = f_n_eval(spec, desc.prime, Value::level(k));
        if (!v || v->is_infinity() || v->index() != k - ell)
            return not_minimal_structural(
                4, "f_p is not an exact right shift at level " + std::to_string(k));
    }
    rep.verdict = ClassificationReport::Verdict::Minimal;
    rep.case_id = ClassificationReport::Case::C4;
    rep.n0 = exps.front() - 1;
    rep.ell = ell;
    return rep;
}

CorroborationSummary corroborate(const FiltrationSpec& spec, int trials,
                                 unsigned long long seed) {
    if (classify_spec(spec).verdict != ClassificationReport::Verdict::Minimal)
        throw StructuralError("corroborate requires a Minimal spec");
    CorroborationSummary summary;
    summary.trials = trials;
    summary.census_level = 8;
    summary.seed = seed;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        Formula phi = random_formula(rng, spec);
        Verdict verdict = classify(phi, spec);
        auto census = extension(phi, spec, summary.census_level);
        std::size_t census_index = 0;
        bool agree = true;
        for (const auto& a : enumerate_truncation(spec, summary.census_level)) {
            const bool in_census =
                census_index < census.size() && census[census_index] == a;
            if (in_census) ++census_index;
            if (verdict.is_member(a) != in_census) {
                agree = false;
                break;
            }
        }
        if (!agree)
            throw InconsistencyError("classify disagrees with the brute-force census for: " +
                                     phi.print());
        ++summary.agreements;
    }
    return summary;
}

NonMinimalWitness witness_nonminimal(const FiltrationSpec& spec) {
    const ClassificationReport rep = classify_spec(spec);
    if (rep.verdict != ClassificationReport::Verdict::NotMinimal)
        throw StructuralError("witness_nonminimal requires a NotMinimal spec");
    NonMinimalWitness w;
    w.description = rep.witness_text;
    if (!rep.witness_formula) return w; // structural failure: no formula witness
    w.formula = parse_formula(*rep.witness_formula, spec.descriptor());
    w.truncation_a = spec.horizon() + 6;
    w.truncation_b = w.truncation_a + 2 * spec.period_length();
    const auto size_a = truncation_size(spec, w.truncation_a).convert_to<std::size_t>();
    const auto size_b = truncation_size(spec, w.truncation_b).convert_to<std::size_t>();
    w.members_a = extension(*w.formula, spec, w.truncation_a).size();
    w.members_b = extension(*w.formula, spec, w.truncation_b).size();
    w.non_members_a = size_a - w.members_a;
    w.non_members_b = size_b - w.members_b;
    w.verified_growth = w.members_b > w.members_a && w.non_members_b > w.non_members_a;
    return w;
}

} // namespace valgroup
