#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "catalog.hpp"
#include "valgroup/classifier.hpp"

using namespace valgroup;
using valgroup::testing::catalog6;
using valgroup::testing::perturb_prefix;
using valgroup::testing::standard_prufer;

namespace {

using Case = ClassificationReport::Case;
using V = ClassificationReport::Verdict;

struct Expected {
    V verdict = V::NotMinimal;
    Case case_id = Case::None;
    std::optional<int> n0, ell;
};

Expected expected_for(const std::string& name) {
    if (name == "prufer_std") return {V::Minimal, Case::C4, 0, 1};
    if (name == "prufer_rr2") return {V::Minimal, Case::C4, 0, 2};
    if (name == "elem_const") return {V::Minimal, Case::C3a, 0, std::nullopt};
    if (name == "elem_incr") return {V::Minimal, Case::C3b, std::nullopt, std::nullopt};
    if (name == "elem_alt") return {V::NotMinimal, Case::None, std::nullopt, std::nullopt};
    if (name == "elem_const_pfx") return {V::Minimal, Case::C3a, 0, std::nullopt};
    FAIL("unknown catalog entry ", name);
    return {};
}

} // namespace

TEST_CASE("the catalog classifies exactly as expected") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const auto rep = classify_spec(spec);
        const auto want = expected_for(name);
        CHECK(rep.verdict == want.verdict);
        CHECK(rep.case_id == want.case_id);
        CHECK(rep.n0 == want.n0);
        CHECK(rep.ell == want.ell);
        CHECK((rep.verdict == V::Minimal) == (rep.case_id != Case::None));
        if (rep.verdict == V::NotMinimal) {
            CHECK(rep.violated_condition.has_value());
            CHECK_FALSE(rep.witness_text.empty());
        }
    }
}

TEST_CASE("the alternating spec fails with an explicit R_2 witness") {
    const auto alt = FiltrationSpec::elem_periodic(2, {}, {1, 2});
    const auto rep = classify_spec(alt);
    CHECK(rep.verdict == V::NotMinimal);
    CHECK(rep.violated_condition == 3);
    CHECK(rep.witness_formula == "R_2(v(x))");
}

TEST_CASE("classification over prime 3") {
    const auto pru3 = classify_spec(FiltrationSpec::prufer(3, 1, {}, {{0}}));
    CHECK(pru3.verdict == V::Minimal);
    CHECK(pru3.case_id == Case::C4);
    CHECK(pru3.n0 == 0);
    CHECK(pru3.ell == 1);
    const auto elem9 = classify_spec(FiltrationSpec::elem_periodic(3, {}, {2}));
    CHECK(elem9.verdict == V::Minimal);
    CHECK(elem9.case_id == Case::C3a);
    CHECK(elem9.n0 == 1); // constant jump 9 = 3^2
}

TEST_CASE("strictly increasing multiplicities from level zero are case 3b") {
    const auto incr = FiltrationSpec::elem_affine(2, {}, 1, 1); // m_k = k + 1
    const auto rep = classify_spec(incr);
    CHECK(rep.verdict == V::Minimal);
    CHECK(rep.case_id == Case::C3b);
}

TEST_CASE("constant jumps with a broken shift are structurally not minimal") {
    const auto broken = FiltrationSpec::prufer(2, 3, {}, {{0, 1}, {0, 2}});
    const auto rep = classify_spec(broken);
    CHECK(rep.verdict == V::NotMinimal);
    CHECK(rep.violated_condition == 4);
    CHECK_FALSE(rep.witness_formula.has_value());
    CHECK(rep.witness_text.find("f_p") != std::string::npos);

    const auto w = witness_nonminimal(broken);
    CHECK_FALSE(w.formula.has_value());
    CHECK_FALSE(w.description.empty());
}

TEST_CASE("prefix perturbations never change the verdict") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const auto base = classify_spec(spec);
        const auto perturbed = classify_spec(perturb_prefix(spec));
        CHECK(base.verdict == perturbed.verdict);
        CHECK(base.case_id == perturbed.case_id);
        CHECK(base.n0 == perturbed.n0);
        CHECK(base.ell == perturbed.ell);
    }
}

TEST_CASE("reported shift matches f_p on a deep window") {
    for (const auto& [name, spec] : catalog6()) {
        if (spec.descriptor().kind != GroupKind::PruferProduct) continue;
        CAPTURE(name);
        const auto rep = classify_spec(spec);
        REQUIRE(rep.ell.has_value());
        const int h = spec.horizon();
        for (int k = h; k <= h + 10; ++k)
            CHECK(f_n_eval(spec, 2, Value::level(k)) == Value::level(k - *rep.ell));
    }
}

TEST_CASE("corroborate") {
    const auto spec = standard_prufer();
    const auto summary = corroborate(spec, 25, 1729);
    CHECK(summary.trials == 25);
    CHECK(summary.agreements == 25);

    const auto empty = corroborate(spec, 0, 1);
    CHECK(empty.trials == 0);
    CHECK(empty.agreements == 0);

    const auto alt = FiltrationSpec::elem_periodic(2, {}, {1, 2});
    CHECK_THROWS_AS(corroborate(alt, 5, 1), StructuralError);
}

TEST_CASE("the R_2 witness for the alternating spec is infinite and co-infinite") {
    const auto alt = FiltrationSpec::elem_periodic(2, {}, {1, 2});
    const auto w = witness_nonminimal(alt);
    REQUIRE(w.formula.has_value());
    CHECK(w.formula->print() == "R_2(v(x))");
    CHECK(w.verified_growth);
    CHECK(w.members_b > w.members_a);
    CHECK(w.non_members_b > w.non_members_a);

    CHECK_THROWS_AS(witness_nonminimal(standard_prufer()), StructuralError);
}
