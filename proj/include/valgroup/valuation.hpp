#pragma once

#include <array>
#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "valgroup/group.hpp"

namespace valgroup {

/// An element of the value set Γ ∪ {∞}: Level(k) for k in ℕ, or Infinity.
///
/// The built-in ordering IS the Γ order: Level(k) < Level(j) iff k > j, and
/// Level(k) < Infinity for every k. Γ \ {∞} has order type ω* with maximum
/// Level(0).
class Value {
public:
    constexpr Value() = default; // Infinity
    static constexpr Value infinity() { return Value(LLONG_MAX); }
    static constexpr Value level(int k) { return Value(-static_cast<long long>(k)); }

    constexpr bool is_infinity() const { return rank_ == LLONG_MAX; }
    /// Level index k; only meaningful when !is_infinity().
    constexpr int index() const { return static_cast<int>(-rank_); }

    friend constexpr auto operator<=>(Value, Value) = default;

    std::string to_text() const {
        return is_infinity() ? "inf" : "L" + std::to_string(index());
    }

private:
    constexpr explicit Value(long long rank) : rank_(rank) {}
    long long rank_ = LLONG_MAX; // Infinity = LLONG_MAX, Level(k) = -k; Γ order = rank order
};

inline Value value_min(Value a, Value b) { return a < b ? a : b; }

/// Finite description of an increasing chain of finite subgroups
/// G_0 ⊂ G_1 ⊂ ... whose union is the whole group; this chain realizes the
/// valuation via v(x) = Level(least k with x in G_k), v(0) = Infinity.
///
/// Schedules: for ElemAbelian, level k contributes m_k >= 1 fresh basis slots;
/// for PruferProduct, level k deepens a nonempty set of factors by one power
/// of p. Schedules are a finite explicit prefix followed by a periodic tail;
/// ElemAbelian additionally supports an affine tail m_k = base + slope*k
/// (slope >= 1) which makes every jump size occur only finitely often.
class FiltrationSpec {
public:
    enum class TailKind { Periodic, Affine };

    static FiltrationSpec elem_periodic(long long prime, std::vector<int> prefix,
                                        std::vector<int> period);
    static FiltrationSpec elem_affine(long long prime, std::vector<int> prefix,
                                      long long base, long long slope);
    static FiltrationSpec prufer(long long prime, int factors,
                                 std::vector<std::vector<int>> prefix,
                                 std::vector<std::vector<int>> period);

    const GroupDescriptor& descriptor() const { return desc_; }
    TailKind tail_kind() const { return tail_; }
    int prefix_length() const;
    /// Period length of the eventual schedule (1 for an affine tail).
    int period_length() const;
    /// prefix_length() + period_length(): beyond this level the eventual
    /// regime governs (periodic jumps; exact f_p shift for Prüfer products).
    int horizon() const { return prefix_length() + period_length(); }

    int multiplicity_at(int level) const;          // ElemAbelian
    std::vector<int> deepen_set_at(int level) const; // PruferProduct
    /// Depth of `factor` after level `level` (level >= -1; depth_at(i,-1) = 0).
    int depth_at(int factor, int level) const;
    /// Least level k with depth_at(factor, k) >= e, for e >= 1.
    int least_level_with_depth(int factor, int e) const;
    /// log_p |G_level| (level >= -1; dim_at(-1) = 0).
    long long dim_at(int level) const;
    /// log_p |G_level / G_{level-1}|.
    int jump_exponent(int level) const;

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    /// Deterministic serialization of the mathematical content (label excluded).
    std::string canonical_text() const;

    friend bool operator==(const FiltrationSpec& a, const FiltrationSpec& b) {
        return a.canonical_text() == b.canonical_text();
    }

private:
    FiltrationSpec() = default;
    void finalize();

    GroupDescriptor desc_;
    TailKind tail_ = TailKind::Periodic;
    std::string label_;

    std::vector<int> elem_prefix_, elem_period_;
    long long affine_base_ = 0, affine_slope_ = 0;

    std::vector<std::vector<int>> pru_prefix_, pru_period_;
    // depth of each factor after each prefix level / after each period position
    std::vector<std::vector<int>> prefix_depth_, period_count_;
    std::vector<int> period_total_;

    std::vector<long long> prefix_dim_; // cumulative dims over the prefix
    long long period_dim_sum_ = 0;
};

constexpr std::size_t kDefaultEnumerationLimit = std::size_t{1} << 22;

/// Infinity iff a = 0; otherwise Level of the least k with a in G_k.
Value value_of(const FiltrationSpec& spec, const GroupElement& a);

BigInt truncation_size(const FiltrationSpec& spec, int K);

/// All elements of G_K in canonical order.
std::vector<GroupElement> enumerate_truncation(const FiltrationSpec& spec, int K,
                                               std::size_t limit = kDefaultEnumerationLimit);

/// Closed ball {v(x) >= γ} = G_k, or open ball {v(x) > γ} = G_{k-1}
/// (with G_{-1} = {0}); the closed ball at Infinity is {0}.
std::vector<GroupElement> ball(const FiltrationSpec& spec, Value gamma, bool closed);

/// The fibre v^{-1}(Level(k)) = G_k \ G_{k-1}.
std::vector<GroupElement> fibre(const FiltrationSpec& spec, int level);

/// |G_k / G_{k-1}| = p^jump_exponent(k).
BigInt jump_size(const FiltrationSpec& spec, int level);

/// R_m at γ: |B̄(γ)/B°(γ)| > m. Rejects γ = Infinity.
bool r_m(const FiltrationSpec& spec, const BigInt& m, Value gamma);

/// f_n at γ: the common value of v(n*x) over the fibre of γ, decided by
/// exhaustive scan; nullopt when the fibre does not agree (axiom (3) broken
/// at γ). Infinity maps to Infinity.
std::optional<Value> f_n_eval(const FiltrationSpec& spec, long long n, Value gamma);

/// The eventual level drop of f_p for Prüfer products (0 for ElemAbelian),
/// measured and verified by fibre scans over [horizon, horizon + 2*period].
/// Throws SpecIntegrityError when f_p is not an exact shift there.
int eventual_shift(const FiltrationSpec& spec);

struct AxiomStatus {
    enum class Kind { Holds, HoldsGenerically, Fails };
    Kind kind = Kind::Holds;
    /// Offending pairs; for Fails the first entry is the witness.
    std::vector<std::pair<GroupElement, GroupElement>> exceptions;
};

struct AxiomReport {
    int truncation = 0;
    int horizon = 0;
    std::array<AxiomStatus, 5> axiom; // axioms (1)..(5)
    bool all_ok() const {
        for (const auto& a : axiom)
            if (a.kind == AxiomStatus::Kind::Fails) return false;
        return true;
    }
};

/// Exhaustively verifies axioms (1)-(2) and the generic forms of (3)-(5)
/// over G_K. Exceptions to (3)-(5) are tolerated only inside the prefix
/// region (both witnesses below horizon); anything beyond is a failure.
AxiomReport check_axioms(const FiltrationSpec& spec, int K);

/// G[n] within the truncation G_K (covers the infinite ElemAbelian kernel).
std::vector<GroupElement> torsion_subgroup(const FiltrationSpec& spec, long long n, int K);

} // namespace valgroup
