#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>

#include "catalog.hpp"
#include "valgroup/order.hpp"

using namespace valgroup;
using valgroup::testing::catalog6;
using valgroup::testing::standard_prufer;

namespace {

GroupElement frac(const FiltrationSpec& s, long long num, int exp) {
    return GroupElement::prufer(s.descriptor(), {{num, exp}});
}

} // namespace

TEST_CASE("order from valuation: inverse order, zero is the unique minimum") {
    const auto spec = standard_prufer();
    const auto view = OrderView::from_valuation(spec, 2);
    const auto zero = GroupElement::zero(spec.descriptor());
    const auto half = frac(spec, 1, 1);
    const auto eighth = frac(spec, 1, 3);
    // v(1/8) = L2 < L0 = v(1/2) in Γ, so 1/2 < 1/8 in the order
    CHECK(view.less(view.index_of(half), view.index_of(eighth)));
    CHECK_FALSE(view.less(view.index_of(eighth), view.index_of(half)));
    for (const auto& x : view.elements())
        if (!x.is_zero()) {
            CHECK(view.less(view.index_of(zero), view.index_of(x)));
            CHECK_FALSE(view.less(view.index_of(x), view.index_of(zero)));
        }
    // the fibre of L0 is {1/2}: its incomparability class is a singleton
    for (const auto& x : view.elements())
        if (!(x == half) && !x.is_zero())
            CHECK_FALSE(view.incomparable(view.index_of(half), view.index_of(x)));
}

TEST_CASE("H_g examples") {
    const auto spec = standard_prufer();
    const auto view = OrderView::from_valuation(spec, 3);
    const auto zero = GroupElement::zero(spec.descriptor());

    const auto h_half = h_subgroup(view, frac(spec, 1, 1));
    CHECK(h_half.is_subgroup);
    CHECK(h_half.members == std::vector<GroupElement>{zero, frac(spec, 1, 1)});

    const auto h_zero = h_subgroup(view, zero);
    CHECK(h_zero.members == std::vector<GroupElement>{zero});

    // {H_g} is linearly ordered by inclusion, following v
    const auto deep = h_subgroup(view, frac(spec, 1, 3)).members;
    const auto shallow = h_subgroup(view, frac(spec, 1, 2)).members;
    CHECK(std::includes(deep.begin(), deep.end(), shallow.begin(), shallow.end()));
}

TEST_CASE("H_g equals the closed ball for every catalog spec") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const auto view = OrderView::from_valuation(spec, 3);
        for (const auto& g : view.elements()) {
            const auto h = h_subgroup(view, g);
            CHECK(h.is_subgroup);
            CHECK(h.members == ball(spec, value_of(spec, g), true));
        }
    }
}

TEST_CASE("valuation_from_order round trip on valuation-induced views") {
    const auto spec = standard_prufer();
    const auto view = OrderView::from_valuation(spec, 4);
    const auto la = valuation_from_order(view);
    CHECK(la.modification_log.empty());
    CHECK(la.roundtrip_matches_original);
    for (std::size_t i = 0; i < view.size(); ++i)
        CHECK(la.values[i] == value_of(spec, view.elements()[i]));

    const auto elem = FiltrationSpec::elem_periodic(2, {}, {1});
    const auto eview = OrderView::from_valuation(elem, 3);
    const auto ela = valuation_from_order(eview);
    CHECK(ela.roundtrip_matches_original);
    std::map<int, int> class_sizes;
    for (std::size_t i = 0; i < eview.size(); ++i)
        if (!ela.values[i].is_infinity()) ++class_sizes[ela.values[i].index()];
    CHECK(class_sizes == std::map<int, int>{{0, 1}, {1, 2}, {2, 4}, {3, 8}});
}

TEST_CASE("valuation_from_order rejects non-group carriers") {
    const auto view = OrderView::from_abstract_table(
        {"a", "b"}, [](std::size_t i, std::size_t j) { return i == 0 && j == 1; });
    CHECK_THROWS_AS(valuation_from_order(view), StructuralError);
}

TEST_CASE("valuation_from_order rejects non-almost-linear orders with a witness") {
    const auto spec = standard_prufer();
    // 0 below everything; 1/4 < 3/4; 1/2 incomparable to both quarters
    const auto ranked = [&](const GroupElement& x) -> int {
        if (x.is_zero()) return 0;
        if (x == frac(spec, 1, 2)) return 1;
        if (x == frac(spec, 3, 2)) return 2;
        return -1; // 1/2
    };
    const auto view = OrderView::from_group_table(
        spec, 1, [&](const GroupElement& a, const GroupElement& b) {
            if (a.is_zero() && !b.is_zero()) return true;
            return ranked(a) > 0 && ranked(b) > 0 && ranked(a) < ranked(b);
        });
    CHECK_THROWS_AS(valuation_from_order(view), NotAlmostLinearError);
}

TEST_CASE("canonical modification merges classes while H_g fails to be a subgroup") {
    const auto spec = standard_prufer();
    // ranks: 0 < {1/4} < {1/2, 3/4} < eighths; H at {0, 1/4} is not closed
    const auto rank = [&](const GroupElement& x) -> int {
        if (x.is_zero()) return 0;
        if (x == frac(spec, 1, 2)) return 1;
        if (x == frac(spec, 1, 1) || x == frac(spec, 3, 2)) return 2;
        return 3;
    };
    const auto view = OrderView::from_group_table(
        spec, 2, [&](const GroupElement& a, const GroupElement& b) { return rank(a) < rank(b); });
    const auto la = valuation_from_order(view);
    CHECK_FALSE(la.roundtrip_matches_original);
    REQUIRE(la.modification_log.size() == 1);
    CHECK(la.modification_log[0].find("merged classes") != std::string::npos);
    // merged level 0 class: the quarters and 1/2 together; eighths at level 1
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& x = view.elements()[i];
        if (x.is_zero())
            CHECK(la.values[i].is_infinity());
        else if (rank(x) <= 2)
            CHECK(la.values[i] == Value::level(0));
        else
            CHECK(la.values[i] == Value::level(1));
    }
}

TEST_CASE("incomparability is an equivalence on valuation-induced carriers") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const auto view = OrderView::from_valuation(spec, 3);
        for (std::size_t a = 0; a < view.size(); ++a)
            for (std::size_t b = 0; b < view.size(); ++b) {
                if (!view.incomparable(a, b)) continue;
                for (std::size_t c = 0; c < view.size(); ++c)
                    if (view.incomparable(b, c)) CHECK(view.incomparable(a, c));
            }
    }
}

TEST_CASE("ultrametric equality case at carrier level: g plus-minus smaller stays put") {
    const auto spec = standard_prufer();
    const auto elems = enumerate_truncation(spec, 4);
    for (const auto& g : elems)
        for (const auto& h : elems) {
            if (!(value_of(spec, h) > value_of(spec, g))) continue;
            for (int sg : {1, -1})
                for (int sh : {1, -1}) {
                    const auto combo = add(scalar_mul(sg, g), scalar_mul(sh, h));
                    CHECK(value_of(spec, combo) == value_of(spec, g));
                }
        }
}

TEST_CASE("multiplying a deep element by a unit keeps its class") {
    for (const auto& [name, spec] : catalog6()) {
        if (spec.descriptor().kind != GroupKind::PruferProduct) continue;
        CAPTURE(name);
        const int h = spec.horizon();
        for (int k = h; k <= h + 3; ++k)
            for (const auto& g : fibre(spec, k))
                for (long long n : {3, 5, 7})
                    CHECK(value_of(spec, scalar_mul(n, g)) == value_of(spec, g));
    }
}

TEST_CASE("all n-th division points of a top-fibre element share one class") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        for (const auto& g : fibre(spec, 4))
            for (long long n : {2, 3, 4}) {
                const auto sols = divide(n, g);
                if (sols.size() < 2) continue;
                const Value v0 = value_of(spec, sols.front());
                for (const auto& s : sols) CHECK(value_of(spec, s) == v0);
            }
    }
}

TEST_CASE("no integer combination from the open ball reaches a top-fibre element") {
    const auto spec = standard_prufer();
    const int K = 4;
    const auto open_ball = ball(spec, Value::level(K), false);
    for (const auto& g : fibre(spec, K))
        CHECK_FALSE(std::binary_search(open_ball.begin(), open_ball.end(), g));
    // subgroup closure of the open ball
    for (const auto& x : open_ball)
        for (const auto& y : open_ball)
            CHECK(std::binary_search(open_ball.begin(), open_ball.end(), sub(x, y)));
}

TEST_CASE("jagiella order basics") {
    CHECK(jagiella_less({3, false}, {5, true})); // (3,l) < (5,r)
    CHECK_FALSE(jagiella_less({2, false}, {3, true}));
    CHECK_FALSE(jagiella_less({3, true}, {2, false})); // a_2, a_3 incomparable
    CHECK(jagiella_less({4, false}, {7, false}));
}

TEST_CASE("jagiella maximal-incomparable function against a window scan") {
    CHECK(jagiella_f({5, false}) == JagiellaPoint{6, true});
    CHECK(jagiella_f({5, true}) == JagiellaPoint{6, false});
    CHECK(jagiella_f({0, false}) == JagiellaPoint{1, true});
    // brute-force oracle over a wide window
    for (long long n = 0; n <= 30; ++n)
        for (bool side : {false, true}) {
            const JagiellaPoint x{n, side};
            JagiellaPoint best{};
            bool found = false;
            for (long long y = 0; y <= 40; ++y)
                for (bool s2 : {false, true}) {
                    const JagiellaPoint cand{y, s2};
                    if (cand == x) continue;
                    if (jagiella_less(x, cand) || jagiella_less(cand, x)) continue;
                    if (!found || jagiella_less(best, cand)) best = cand;
                    found = true;
                }
            REQUIRE(found);
            CHECK(jagiella_f(x) == best);
        }
}

TEST_CASE("jagiella derived order and quotient") {
    for (long long n = 0; n <= 20; ++n) {
        CHECK(jagiella_derived_less({n, false}, {n + 1, true}));
        CHECK_FALSE(jagiella_derived_less({n, false}, {n, true}));
        CHECK_FALSE(jagiella_derived_less({n, true}, {n, false}));
    }
    CHECK(jagiella_quotient_class({7, true}) == 7);
}

TEST_CASE("triangle order") {
    CHECK(triangle_less({2, 1}, {5, 0}));
    CHECK_FALSE(triangle_less({4, 0}, {4, 4}));
    CHECK_FALSE(triangle_less({4, 4}, {4, 0}));
    CHECK(triangle_quotient_class({4, 4}) == 4);
}

TEST_CASE("example suites pass") {
    const auto jag = run_jagiella_suite(30);
    for (const auto& c : jag.checks) {
        CAPTURE(c.name);
        CHECK(c.passed);
    }
    const auto tri = run_triangle_suite(30);
    for (const auto& c : tri.checks) {
        CAPTURE(c.name);
        CHECK(c.passed);
    }
}
