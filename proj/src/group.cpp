#include "valgroup/group.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace valgroup {

namespace {

constexpr std::size_t kMaxFiniteSet = std::size_t{1} << 22;

void require_same_group(const GroupElement& a, const GroupElement& b) {
    if (!(a.descriptor() == b.descriptor()))
        throw StructuralError("group elements belong to different groups");
}

PruferComponent make_component(BigInt num, int exp, long long p) {
    BigInt modulus = int_pow(p, exp);
    num %= modulus;
    if (num < 0) num += modulus;
    while (num != 0 && num % p == 0) {
        num /= p;
        --exp;
    }
    if (num == 0) exp = 0;
    return PruferComponent{std::move(num), exp};
}

} // namespace

void GroupDescriptor::validate() const {
    if (!is_prime(prime))
        throw ValidationError("prime", std::to_string(prime) + " is not prime");
    if (kind == GroupKind::PruferProduct && factor_count < 1)
        throw ValidationError("factors", "factor count must be >= 1");
}

std::string GroupDescriptor::to_text() const {
    std::ostringstream os;
    if (kind == GroupKind::ElemAbelian) {
        os << "F_" << prime << "^(w)";
    } else {
        os << "Z(" << prime << "^inf)";
        if (factor_count > 1) os << "^" << factor_count;
    }
    return os.str();
}

GroupElement GroupElement::zero(const GroupDescriptor& desc) {
    GroupElement e;
    e.desc_ = desc;
    if (desc.kind == GroupKind::ElemAbelian) {
        e.rep_ = ElemSupport{};
    } else {
        e.rep_ = PruferTuple(static_cast<std::size_t>(desc.factor_count));
    }
    return e;
}

GroupElement GroupElement::basis(const GroupDescriptor& desc, int level, int slot,
                                 long long coeff) {
    if (desc.kind != GroupKind::ElemAbelian)
        throw StructuralError("basis elements exist only in elementary abelian groups");
    return from_support(desc, ElemSupport{{level, slot, coeff}});
}

GroupElement GroupElement::from_support(const GroupDescriptor& desc, ElemSupport raw) {
    if (desc.kind != GroupKind::ElemAbelian)
        throw StructuralError("support representation requires an elementary abelian group");
    const long long p = desc.prime;
    std::sort(raw.begin(), raw.end(),
              [](const BasisCoeff& a, const BasisCoeff& b) {
                  return std::pair(a.level, a.slot) < std::pair(b.level, b.slot);
              });
    ElemSupport out;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i;
        long long c = 0;
        while (j < raw.size() && raw[j].level == raw[i].level && raw[j].slot == raw[i].slot) {
            c += raw[j].coeff % p;
            ++j;
        }
        c = ((c % p) + p) % p;
        if (raw[i].level < 0 || raw[i].slot < 0)
            throw StructuralError("basis indices must be non-negative");
        if (c != 0) out.push_back({raw[i].level, raw[i].slot, c});
        i = j;
    }
    GroupElement e;
    e.desc_ = desc;
    e.rep_ = std::move(out);
    return e;
}

GroupElement GroupElement::prufer(const GroupDescriptor& desc,
                                  std::vector<std::pair<BigInt, int>> components) {
    if (desc.kind != GroupKind::PruferProduct)
        throw StructuralError("tuple representation requires a Prüfer product");
    if (components.size() != static_cast<std::size_t>(desc.factor_count))
        throw StructuralError("component count does not match factor count");
    PruferTuple t;
    t.reserve(components.size());
    for (auto& [num, exp] : components) {
        if (exp < 0) throw StructuralError("denominator exponent must be >= 0");
        t.push_back(make_component(std::move(num), exp, desc.prime));
    }
    GroupElement e;
    e.desc_ = desc;
    e.rep_ = std::move(t);
    return e;
}

GroupElement GroupElement::from_canonical_support(const GroupDescriptor& desc,
                                                  ElemSupport supp) {
    GroupElement e;
    e.desc_ = desc;
    e.rep_ = std::move(supp);
    return e;
}

GroupElement GroupElement::from_canonical_components(const GroupDescriptor& desc,
                                                     PruferTuple t) {
    GroupElement e;
    e.desc_ = desc;
    e.rep_ = std::move(t);
    return e;
}

bool GroupElement::is_zero() const {
    if (std::holds_alternative<ElemSupport>(rep_)) return support().empty();
    for (const auto& c : components())
        if (c.num != 0) return false;
    return true;
}

std::string GroupElement::to_text() const {
    if (desc_.kind == GroupKind::ElemAbelian) {
        if (support().empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& b : support()) {
            if (!first) os << " + ";
            first = false;
            os << "(" << b.level << "," << b.slot << "):" << b.coeff;
        }
        return os.str();
    }
    auto render = [&](const PruferComponent& c) {
        if (c.num == 0) return std::string("0");
        std::ostringstream os;
        os << c.num << "/" << int_pow(desc_.prime, c.exp);
        return os.str();
    };
    if (components().size() == 1) return render(components()[0]);
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < components().size(); ++i) {
        if (i) os << ", ";
        os << render(components()[i]);
    }
    os << ")";
    return os.str();
}

bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.desc_ == b.desc_ && a.rep_ == b.rep_;
}

bool operator<(const GroupElement& a, const GroupElement& b) {
    require_same_group(a, b);
    if (a.desc_.kind == GroupKind::ElemAbelian) {
        return std::lexicographical_compare(
            a.support().begin(), a.support().end(), b.support().begin(), b.support().end(),
            [](const BasisCoeff& x, const BasisCoeff& y) {
                return std::tie(x.level, x.slot, x.coeff) < std::tie(y.level, y.slot, y.coeff);
            });
    }
    return std::lexicographical_compare(a.components().begin(), a.components().end(),
                                        b.components().begin(), b.components().end());
}

GroupElement add(const GroupElement& a, const GroupElement& b) {
    require_same_group(a, b);
    const auto& desc = a.descriptor();
    if (desc.kind == GroupKind::ElemAbelian) {
        // both supports are canonical: one sorted merge pass suffices
        const auto& A = a.support();
        const auto& B = b.support();
        ElemSupport out;
        out.reserve(A.size() + B.size());
        std::size_t i = 0, j = 0;
        while (i < A.size() || j < B.size()) {
            if (j == B.size() ||
                (i < A.size() &&
                 std::pair(A[i].level, A[i].slot) < std::pair(B[j].level, B[j].slot))) {
                out.push_back(A[i++]);
            } else if (i == A.size() ||
                       std::pair(B[j].level, B[j].slot) < std::pair(A[i].level, A[i].slot)) {
                out.push_back(B[j++]);
            } else {
                const long long c = (A[i].coeff + B[j].coeff) % desc.prime;
                if (c != 0) out.push_back({A[i].level, A[i].slot, c});
                ++i;
                ++j;
            }
        }
        return GroupElement::from_canonical_support(desc, std::move(out));
    }
    const long long p = desc.prime;
    std::vector<std::pair<BigInt, int>> out;
    out.reserve(a.components().size());
    for (std::size_t i = 0; i < a.components().size(); ++i) {
        const auto& x = a.components()[i];
        const auto& y = b.components()[i];
        int e = std::max(x.exp, y.exp);
        BigInt num = x.num * int_pow(p, e - x.exp) + y.num * int_pow(p, e - y.exp);
        out.emplace_back(std::move(num), e);
    }
    return GroupElement::prufer(desc, std::move(out));
}

GroupElement negate(const GroupElement& a) {
    const auto& desc = a.descriptor();
    if (desc.kind == GroupKind::ElemAbelian) {
        ElemSupport s = a.support();
        for (auto& b : s) b.coeff = desc.prime - b.coeff; // stays in 1..p-1
        return GroupElement::from_canonical_support(desc, std::move(s));
    }
    std::vector<std::pair<BigInt, int>> out;
    for (const auto& c : a.components())
        out.emplace_back(-c.num, c.exp);
    return GroupElement::prufer(desc, std::move(out));
}

GroupElement sub(const GroupElement& a, const GroupElement& b) { return add(a, negate(b)); }

GroupElement scalar_mul(long long n, const GroupElement& a) {
    const auto& desc = a.descriptor();
    if (desc.kind == GroupKind::ElemAbelian) {
        const long long p = desc.prime;
        const long long r = ((n % p) + p) % p;
        if (r == 0) return GroupElement::zero(desc);
        ElemSupport s = a.support();
        // p prime and r, coeff nonzero: the product stays nonzero mod p
        for (auto& b : s) b.coeff = b.coeff * r % p;
        return GroupElement::from_canonical_support(desc, std::move(s));
    }
    std::vector<std::pair<BigInt, int>> out;
    for (const auto& c : a.components())
        out.emplace_back(c.num * n, c.exp);
    return GroupElement::prufer(desc, std::move(out));
}

BigInt element_order(const GroupElement& a) {
    if (a.descriptor().kind == GroupKind::ElemAbelian)
        return a.is_zero() ? 1 : a.descriptor().prime;
    int e = 0;
    for (const auto& c : a.components()) e = std::max(e, c.exp);
    return int_pow(a.descriptor().prime, e);
}

std::vector<GroupElement> divide(long long n, const GroupElement& a) {
    if (n < 1) throw StructuralError("divide requires a positive scalar");
    const auto& desc = a.descriptor();
    const long long p = desc.prime;
    const int nu = padic_valuation(n, p);
    long long unit = n;
    for (int i = 0; i < nu; ++i) unit /= p;

    if (desc.kind == GroupKind::ElemAbelian) {
        if (nu > 0) {
            if (!a.is_zero()) return {};
            throw BoundedEnumerationError(
                "n*y = 0 with p | n has the whole elementary abelian group as solution set");
        }
        // multiplication by a unit is an automorphism: unique solution
        BigInt inv = mod_inverse(unit % p, p);
        return {scalar_mul(inv.convert_to<long long>(), a)};
    }

    // Solve p^nu * w = a componentwise, then y = unit^{-1} * w.
    const int d = desc.factor_count;
    const BigInt p_nu = int_pow(p, nu);
    if (int_pow(p, nu * d) > kMaxFiniteSet)
        throw BoundedEnumerationError("divide solution set exceeds enumeration budget");
    std::vector<std::vector<PruferComponent>> per_component(d);
    for (int i = 0; i < d; ++i) {
        const auto& c = a.components()[i];
        const BigInt step = int_pow(p, c.exp);
        per_component[i].reserve(p_nu.convert_to<std::size_t>());
        for (BigInt t = 0; t < p_nu; ++t)
            per_component[i].push_back(make_component(c.num + t * step, c.exp + nu, p));
    }

    std::vector<GroupElement> solutions;
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
        std::vector<std::pair<BigInt, int>> comps;
        comps.reserve(d);
        int max_exp = 0;
        for (int i = 0; i < d; ++i) {
            const auto& c = per_component[i][idx[i]];
            comps.emplace_back(c.num, c.exp);
            max_exp = std::max(max_exp, c.exp);
        }
        if (unit == 1) {
            solutions.push_back(GroupElement::prufer(desc, std::move(comps)));
        } else {
            BigInt modulus = int_pow(p, max_exp);
            if (modulus == 1) modulus = p;
            BigInt inv = mod_inverse(BigInt(unit), modulus);
            for (auto& [num, exp] : comps) num *= inv;
            solutions.push_back(GroupElement::prufer(desc, std::move(comps)));
        }
        int pos = d - 1;
        while (pos >= 0 && ++idx[pos] == per_component[pos].size()) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    std::sort(solutions.begin(), solutions.end());
    solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());
    return solutions;
}

std::vector<GroupElement> torsion_subgroup(const GroupDescriptor& desc, long long n) {
    if (n < 1) throw StructuralError("torsion_subgroup requires a positive n");
    desc.validate();
    const long long p = desc.prime;
    const int nu = padic_valuation(n, p);
    if (desc.kind == GroupKind::ElemAbelian) {
        if (nu > 0)
            throw BoundedEnumerationError(
                "G[n] with p | n is the whole elementary abelian group; supply a truncation");
        return {GroupElement::zero(desc)};
    }
    const int d = desc.factor_count;
    const BigInt size = int_pow(p, nu * d);
    if (size > kMaxFiniteSet)
        throw BoundedEnumerationError("torsion subgroup exceeds enumeration budget");
    const BigInt per = int_pow(p, nu);
    std::vector<GroupElement> out;
    std::vector<BigInt> counter(d, 0);
    for (;;) {
        std::vector<std::pair<BigInt, int>> comps;
        comps.reserve(d);
        for (int i = 0; i < d; ++i) comps.emplace_back(counter[i], nu);
        out.push_back(GroupElement::prufer(desc, std::move(comps)));
        int pos = d - 1;
        while (pos >= 0 && ++counter[pos] == per) {
            counter[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace valgroup
