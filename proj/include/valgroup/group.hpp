#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "valgroup/bigint.hpp"
#include "valgroup/errors.hpp"

namespace valgroup {

enum class GroupKind { ElemAbelian, PruferProduct };

/// The two group shapes the workbench supports: the elementary abelian group
/// of exponent p with countably many basis vectors, and a finite product of
/// d copies of the Prüfer p-group (p-power-denominator rationals mod 1).
struct GroupDescriptor {
    long long prime = 2;
    GroupKind kind = GroupKind::PruferProduct;
    int factor_count = 1; // PruferProduct only

    void validate() const;
    bool operator==(const GroupDescriptor&) const = default;
    std::string to_text() const;
};

/// One coordinate of an elementary-abelian element. Basis vectors are indexed
/// by (level, slot) so a filtration can read levels straight off the support.
struct BasisCoeff {
    int level = 0;
    int slot = 0;
    long long coeff = 1; // in 1..p-1
    auto operator<=>(const BasisCoeff&) const = default;
};

/// Sorted by (level, slot); no zero coefficients; no duplicate indices.
using ElemSupport = std::vector<BasisCoeff>;

/// One coordinate of a Prüfer-product element: num/p^exp in canonical form,
/// i.e. 0 <= num < p^exp, p does not divide num, and num == 0 iff exp == 0.
struct PruferComponent {
    BigInt num = 0;
    int exp = 0;

    friend bool operator==(const PruferComponent& a, const PruferComponent& b) {
        return a.exp == b.exp && a.num == b.num;
    }
    friend bool operator<(const PruferComponent& a, const PruferComponent& b) {
        if (a.exp != b.exp) return a.exp < b.exp;
        return a.num < b.num;
    }
};

using PruferTuple = std::vector<PruferComponent>;

/// Immutable group element in canonical form. All operations are pure.
class GroupElement {
public:
    GroupElement() = default; // zero element of a default descriptor; for containers

    static GroupElement zero(const GroupDescriptor& desc);
    static GroupElement basis(const GroupDescriptor& desc, int level, int slot,
                              long long coeff = 1);
    /// Canonicalizes: sorts, merges duplicate indices, drops coefficients == 0 (mod p).
    static GroupElement from_support(const GroupDescriptor& desc, ElemSupport raw);
    /// Components given as (numerator, denominator_exponent) pairs; canonicalized.
    static GroupElement prufer(const GroupDescriptor& desc,
                               std::vector<std::pair<BigInt, int>> components);
    /// Trusted constructors for hot paths. The caller guarantees canonical
    /// form: sorted support with coefficients in 1..p-1, or reduced
    /// components with p not dividing the numerator.
    static GroupElement from_canonical_support(const GroupDescriptor& desc, ElemSupport supp);
    static GroupElement from_canonical_components(const GroupDescriptor& desc, PruferTuple t);

    const GroupDescriptor& descriptor() const { return desc_; }
    bool is_zero() const;
    const ElemSupport& support() const { return std::get<ElemSupport>(rep_); }
    const PruferTuple& components() const { return std::get<PruferTuple>(rep_); }

    /// Canonical rendering: "3/8", "(1/2, 0)", "(0,0):1 + (4,1):2", "0".
    std::string to_text() const;

    friend bool operator==(const GroupElement& a, const GroupElement& b);
    /// Structural total order; used to keep element lists canonical.
    friend bool operator<(const GroupElement& a, const GroupElement& b);

private:
    GroupDescriptor desc_;
    std::variant<ElemSupport, PruferTuple> rep_;
};

GroupElement add(const GroupElement& a, const GroupElement& b);
GroupElement negate(const GroupElement& a);
GroupElement sub(const GroupElement& a, const GroupElement& b);
GroupElement scalar_mul(long long n, const GroupElement& a);

/// Least n >= 1 with n*a = 0; always a power of the descriptor's prime.
BigInt element_order(const GroupElement& a);

/// The exact solution set of n*y = a, canonically ordered. Throws
/// BoundedEnumerationError for the one infinite case (ElemAbelian, p | n, a = 0).
std::vector<GroupElement> divide(long long n, const GroupElement& a);

/// G[n] = {x : n*x = 0}. Finite for PruferProduct and for ElemAbelian with
/// p coprime to n; throws BoundedEnumerationError otherwise (use the
/// truncated overload in valuation.hpp for that case).
std::vector<GroupElement> torsion_subgroup(const GroupDescriptor& desc, long long n);

} // namespace valgroup
