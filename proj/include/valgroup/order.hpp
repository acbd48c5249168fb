#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "valgroup/valuation.hpp"

namespace valgroup {

/// A finite carrier with a decidable strict partial order. Carriers are
/// either group truncations G_K (possibly with a tweaked order table) or
/// abstract example structures. The order is validated to be irreflexive
/// and transitive on construction.
class OrderView {
public:
    enum class Provenance { FromValuation, GroupTable, Example };

    /// Carrier G_K with x < y iff v(x) > v(y) (the inverse order induced
    /// from the valuation); incomparability is v-equality.
    static OrderView from_valuation(const FiltrationSpec& spec, int K);
    /// Carrier G_K with an arbitrary explicit order table (for perturbation
    /// experiments); `less` is consulted once per ordered pair.
    static OrderView from_group_table(const FiltrationSpec& spec, int K,
                                      const std::function<bool(const GroupElement&,
                                                               const GroupElement&)>& less);
    /// Abstract labelled carrier, no group structure.
    static OrderView from_abstract_table(std::vector<std::string> labels,
                                         const std::function<bool(std::size_t, std::size_t)>& less);

    std::size_t size() const { return size_; }
    bool less(std::size_t a, std::size_t b) const {
        return (rows_[a * stride_ + b / 64] >> (b % 64)) & 1u;
    }
    bool incomparable(std::size_t a, std::size_t b) const {
        return !less(a, b) && !less(b, a);
    }

    Provenance provenance() const { return provenance_; }
    bool has_group_carrier() const { return !elements_.empty() || zero_index_.has_value(); }
    const std::vector<GroupElement>& elements() const { return elements_; }
    const FiltrationSpec& spec() const;
    std::size_t index_of(const GroupElement& x) const;
    const std::string& label_of(std::size_t i) const { return labels_[i]; }

private:
    OrderView() = default;
    void set_less(std::size_t a, std::size_t b, bool on);
    void validate_strict_partial_order() const;

    Provenance provenance_ = Provenance::Example;
    std::size_t size_ = 0, stride_ = 0;
    std::vector<std::uint64_t> rows_;
    std::vector<GroupElement> elements_; // group carriers; sorted
    std::vector<std::string> labels_;
    std::optional<FiltrationSpec> spec_;
    std::optional<std::size_t> zero_index_;

    friend struct OrderViewRebuilder;
};

struct HSubgroupResult {
    std::vector<GroupElement> members; // H_g = {x : not (x > g)}, sorted
    bool is_subgroup = false;          // closed under subtraction
};

/// H_g over a group carrier. For views from valuations H_g = B̄(v(g)).
HSubgroupResult h_subgroup(const OrderView& view, const GroupElement& g);

struct LevelAssignment {
    /// Aligned with view.elements(): the recovered value of each element.
    std::vector<Value> values;
    /// Canonical finite modifications applied before reading off the levels
    /// (zero forced to be the unique minimum; initial-segment classes merged
    /// while H_g fails to be a subgroup). Empty for valuation-induced views.
    std::vector<std::string> modification_log;
    /// Whether x < y iff v(x) > v(y) reproduces the ORIGINAL relation.
    bool roundtrip_matches_original = false;
};

/// Reads a valuation off an almost-linear order on a group carrier.
/// Throws NotAlmostLinearError (with a witness triple) when incomparability
/// is not transitive, StructuralError for non-group carriers.
LevelAssignment valuation_from_order(const OrderView& view);

// ---------------------------------------------------------------------------
// Concrete example structures.

struct JagiellaPoint {
    long long n = 0;
    bool right = false; // side: l or r
    friend bool operator==(const JagiellaPoint&, const JagiellaPoint&) = default;
    std::string to_text() const {
        return "(" + std::to_string(n) + (right ? ",r)" : ",l)");
    }
};

/// Natural order on each side; across sides (x,l)<(y,r) iff x+2 <= y and
/// (y,r)<(x,l) iff y+2 <= x.
bool jagiella_less(const JagiellaPoint& a, const JagiellaPoint& b);
/// The maximum element incomparable to x, found by bounded window search.
JagiellaPoint jagiella_f(const JagiellaPoint& x);
/// x <' y iff x < y or y = f(x).
bool jagiella_derived_less(const JagiellaPoint& a, const JagiellaPoint& b);
/// Index of the <'-incomparability class {(n,l),(n,r)}.
long long jagiella_quotient_class(const JagiellaPoint& x);

struct TrianglePoint {
    long long n = 0, m = 0; // m <= n
    friend bool operator==(const TrianglePoint&, const TrianglePoint&) = default;
    std::string to_text() const {
        return "(" + std::to_string(n) + "," + std::to_string(m) + ")";
    }
};

bool triangle_less(const TrianglePoint& a, const TrianglePoint& b);
long long triangle_quotient_class(const TrianglePoint& x);

struct ExampleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExampleSuiteResult {
    std::vector<ExampleCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

ExampleSuiteResult run_jagiella_suite(long long bound);
ExampleSuiteResult run_triangle_suite(long long bound);

} // namespace valgroup
