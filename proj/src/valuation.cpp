#include "valgroup/valuation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace valgroup {

namespace {

std::vector<int> normalize_deepen_set(std::vector<int> s, int factors,
                                      const std::string& field) {
    if (s.empty()) throw ValidationError(field, "deepen set must be nonempty");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw ValidationError(field, "duplicate factor index");
    if (s.front() < 0 || s.back() >= factors)
        throw ValidationError(field, "factor index out of range 0.." +
                                         std::to_string(factors - 1));
    return s;
}

} // namespace

FiltrationSpec FiltrationSpec::elem_periodic(long long prime, std::vector<int> prefix,
                                             std::vector<int> period) {
    FiltrationSpec s;
    s.desc_ = GroupDescriptor{prime, GroupKind::ElemAbelian, 0};
    s.desc_.validate();
    s.tail_ = TailKind::Periodic;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (prefix[i] < 1)
            throw ValidationError("[prefix].mult[" + std::to_string(i) + "]",
                                  "multiplicity must be >= 1");
    if (period.empty())
        throw ValidationError("[eventual]", "periodic schedule must have period >= 1");
    for (std::size_t i = 0; i < period.size(); ++i)
        if (period[i] < 1)
            throw ValidationError("[eventual].mult[" + std::to_string(i) + "]",
                                  "multiplicity must be >= 1");
    s.elem_prefix_ = std::move(prefix);
    s.elem_period_ = std::move(period);
    s.finalize();
    return s;
}

FiltrationSpec FiltrationSpec::elem_affine(long long prime, std::vector<int> prefix,
                                           long long base, long long slope) {
    FiltrationSpec s;
    s.desc_ = GroupDescriptor{prime, GroupKind::ElemAbelian, 0};
    s.desc_.validate();
    s.tail_ = TailKind::Affine;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (prefix[i] < 1)
            throw ValidationError("[prefix].mult[" + std::to_string(i) + "]",
                                  "multiplicity must be >= 1");
    if (slope < 1)
        throw ValidationError("[eventual].affine_slope",
                              "affine multiplicities must be strictly increasing (slope >= 1)");
    if (base + slope * static_cast<long long>(prefix.size()) < 1)
        throw ValidationError("[eventual].affine_base",
                              "first affine multiplicity must be >= 1");
    s.elem_prefix_ = std::move(prefix);
    s.affine_base_ = base;
    s.affine_slope_ = slope;
    s.finalize();
    return s;
}

FiltrationSpec FiltrationSpec::prufer(long long prime, int factors,
                                      std::vector<std::vector<int>> prefix,
                                      std::vector<std::vector<int>> period) {
    FiltrationSpec s;
    s.desc_ = GroupDescriptor{prime, GroupKind::PruferProduct, factors};
    s.desc_.validate();
    s.tail_ = TailKind::Periodic;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        prefix[i] = normalize_deepen_set(std::move(prefix[i]), factors,
                                         "[prefix].deepen[" + std::to_string(i) + "]");
    if (period.empty())
        throw ValidationError("[eventual]", "periodic schedule must have period >= 1");
    std::vector<bool> covered(static_cast<std::size_t>(factors), false);
    for (std::size_t i = 0; i < period.size(); ++i) {
        period[i] = normalize_deepen_set(std::move(period[i]), factors,
                                         "[eventual].deepen[" + std::to_string(i) + "]");
        for (int f : period[i]) covered[static_cast<std::size_t>(f)] = true;
    }
    for (int f = 0; f < factors; ++f)
        if (!covered[static_cast<std::size_t>(f)])
            throw ValidationError("[eventual]",
                                  "factor " + std::to_string(f) +
                                      " is never deepened over the eventual period");
    s.pru_prefix_ = std::move(prefix);
    s.pru_period_ = std::move(period);
    s.finalize();
    return s;
}

void FiltrationSpec::finalize() {
    if (desc_.kind == GroupKind::ElemAbelian) {
        prefix_dim_.clear();
        long long acc = 0;
        for (int m : elem_prefix_) prefix_dim_.push_back(acc += m);
        period_dim_sum_ = std::accumulate(elem_period_.begin(), elem_period_.end(), 0LL);
        return;
    }
    const int d = desc_.factor_count;
    prefix_depth_.assign(pru_prefix_.size(), std::vector<int>(d, 0));
    for (std::size_t k = 0; k < pru_prefix_.size(); ++k) {
        if (k > 0) prefix_depth_[k] = prefix_depth_[k - 1];
        for (int f : pru_prefix_[k]) ++prefix_depth_[k][static_cast<std::size_t>(f)];
    }
    period_count_.assign(pru_period_.size(), std::vector<int>(d, 0));
    for (std::size_t r = 0; r < pru_period_.size(); ++r) {
        if (r > 0) period_count_[r] = period_count_[r - 1];
        for (int f : pru_period_[r]) ++period_count_[r][static_cast<std::size_t>(f)];
    }
    period_total_ = period_count_.back();
}

int FiltrationSpec::prefix_length() const {
    return desc_.kind == GroupKind::ElemAbelian ? static_cast<int>(elem_prefix_.size())
                                                : static_cast<int>(pru_prefix_.size());
}

int FiltrationSpec::period_length() const {
    if (tail_ == TailKind::Affine) return 1;
    return desc_.kind == GroupKind::ElemAbelian ? static_cast<int>(elem_period_.size())
                                                : static_cast<int>(pru_period_.size());
}

int FiltrationSpec::multiplicity_at(int level) const {
    if (desc_.kind != GroupKind::ElemAbelian)
        throw StructuralError("multiplicities apply to elementary abelian specs only");
    if (level < 0) throw StructuralError("negative level");
    const int pl = prefix_length();
    if (level < pl) return elem_prefix_[static_cast<std::size_t>(level)];
    if (tail_ == TailKind::Affine)
        return static_cast<int>(affine_base_ + affine_slope_ * level);
    return elem_period_[static_cast<std::size_t>((level - pl) % period_length())];
}

std::vector<int> FiltrationSpec::deepen_set_at(int level) const {
    if (desc_.kind != GroupKind::PruferProduct)
        throw StructuralError("deepen sets apply to Prüfer-product specs only");
    if (level < 0) throw StructuralError("negative level");
    const int pl = prefix_length();
    if (level < pl) return pru_prefix_[static_cast<std::size_t>(level)];
    return pru_period_[static_cast<std::size_t>((level - pl) % period_length())];
}

int FiltrationSpec::depth_at(int factor, int level) const {
    if (level < 0) return 0;
    const auto f = static_cast<std::size_t>(factor);
    const int pl = prefix_length();
    if (level < pl) return prefix_depth_[static_cast<std::size_t>(level)][f];
    const int base = pl > 0 ? prefix_depth_.back()[f] : 0;
    const int P = period_length();
    const int t = level - pl;
    return base + (t / P) * period_total_[f] + period_count_[static_cast<std::size_t>(t % P)][f];
}

int FiltrationSpec::least_level_with_depth(int factor, int e) const {
    const auto f = static_cast<std::size_t>(factor);
    const int pl = prefix_length();
    for (int k = 0; k < pl; ++k)
        if (prefix_depth_[static_cast<std::size_t>(k)][f] >= e) return k;
    const int base = pl > 0 ? prefix_depth_.back()[f] : 0;
    int rem = e - base; // >= 1, else the prefix scan returned
    const int P = period_length();
    const int full = (rem - 1) / period_total_[f];
    rem -= full * period_total_[f];
    for (int r = 0; r < P; ++r)
        if (period_count_[static_cast<std::size_t>(r)][f] >= rem) return pl + full * P + r;
    throw StructuralError("unreachable: eventual period covers every factor");
}

long long FiltrationSpec::dim_at(int level) const {
    if (level < 0) return 0;
    if (desc_.kind == GroupKind::PruferProduct) {
        long long dim = 0;
        for (int i = 0; i < desc_.factor_count; ++i) dim += depth_at(i, level);
        return dim;
    }
    const int pl = prefix_length();
    const long long prefix_part =
        pl == 0 ? 0 : prefix_dim_[static_cast<std::size_t>(std::min(level, pl - 1))];
    if (level < pl) return prefix_part;
    const long long n = level - pl + 1; // tail levels pl..level
    if (tail_ == TailKind::Affine)
        return prefix_part + n * affine_base_ +
               affine_slope_ * (static_cast<long long>(pl) + level) * n / 2;
    const int P = period_length();
    long long tail = (n / P) * period_dim_sum_;
    for (long long r = 0; r < n % P; ++r) tail += elem_period_[static_cast<std::size_t>(r)];
    return prefix_part + tail;
}

int FiltrationSpec::jump_exponent(int level) const {
    if (desc_.kind == GroupKind::ElemAbelian) return multiplicity_at(level);
    return static_cast<int>(deepen_set_at(level).size());
}

std::string FiltrationSpec::canonical_text() const {
    std::ostringstream os;
    if (desc_.kind == GroupKind::ElemAbelian) {
        os << "elem;p=" << desc_.prime << ";prefix=[";
        for (std::size_t i = 0; i < elem_prefix_.size(); ++i)
            os << (i ? "," : "") << elem_prefix_[i];
        os << "];";
        if (tail_ == TailKind::Affine) {
            os << "affine=(" << affine_base_ << "," << affine_slope_ << ")";
        } else {
            os << "period=[";
            for (std::size_t i = 0; i < elem_period_.size(); ++i)
                os << (i ? "," : "") << elem_period_[i];
            os << "]";
        }
        return os.str();
    }
    auto render_sets = [&](const std::vector<std::vector<int>>& sets) {
        os << "[";
        for (std::size_t i = 0; i < sets.size(); ++i) {
            os << (i ? ",{" : "{");
            for (std::size_t j = 0; j < sets[i].size(); ++j) os << (j ? "," : "") << sets[i][j];
            os << "}";
        }
        os << "]";
    };
    os << "prufer;p=" << desc_.prime << ";d=" << desc_.factor_count << ";prefix=";
    render_sets(pru_prefix_);
    os << ";period=";
    render_sets(pru_period_);
    return os.str();
}

Value value_of(const FiltrationSpec& spec, const GroupElement& a) {
    if (!(a.descriptor() == spec.descriptor()))
        throw StructuralError("element does not belong to this filtration's group");
    if (spec.descriptor().kind == GroupKind::ElemAbelian) {
        if (a.support().empty()) return Value::infinity();
        int level = 0;
        for (const auto& b : a.support()) {
            if (b.slot >= spec.multiplicity_at(b.level))
                throw StructuralError("basis slot " + std::to_string(b.slot) +
                                      " does not exist at level " + std::to_string(b.level));
            level = std::max(level, b.level);
        }
        return Value::level(level);
    }
    if (a.is_zero()) return Value::infinity();
    int level = 0;
    for (int i = 0; i < spec.descriptor().factor_count; ++i) {
        const auto& c = a.components()[static_cast<std::size_t>(i)];
        if (c.exp > 0) level = std::max(level, spec.least_level_with_depth(i, c.exp));
    }
    return Value::level(level);
}

BigInt truncation_size(const FiltrationSpec& spec, int K) {
    return int_pow(spec.descriptor().prime, spec.dim_at(K));
}

std::vector<GroupElement> enumerate_truncation(const FiltrationSpec& spec, int K,
                                               std::size_t limit) {
    if (K < 0) return {GroupElement::zero(spec.descriptor())};
    const BigInt size = truncation_size(spec, K);
    if (size > limit)
        throw BoundedEnumerationError("G_" + std::to_string(K) + " has " + size.str() +
                                      " elements, over the enumeration budget");
    const auto& desc = spec.descriptor();
    const long long p = desc.prime;
    std::vector<GroupElement> out;
    out.reserve(size.convert_to<std::size_t>());

    if (desc.kind == GroupKind::ElemAbelian) {
        std::vector<std::pair<int, int>> positions; // (level, slot), ascending
        for (int k = 0; k <= K; ++k)
            for (int s = 0; s < spec.multiplicity_at(k); ++s) positions.emplace_back(k, s);
        std::vector<long long> digits(positions.size(), 0);
        for (;;) {
            ElemSupport supp;
            supp.reserve(positions.size());
            for (std::size_t i = 0; i < digits.size(); ++i)
                if (digits[i] != 0)
                    supp.push_back({positions[i].first, positions[i].second, digits[i]});
            out.push_back(GroupElement::from_canonical_support(desc, std::move(supp)));
            std::size_t pos = 0;
            while (pos < digits.size() && ++digits[pos] == p) digits[pos++] = 0;
            if (pos == digits.size()) break;
        }
    } else {
        // one canonical component table per factor, indexed by the odometer
        const int d = desc.factor_count;
        std::vector<std::vector<PruferComponent>> table(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            const int depth = spec.depth_at(i, K);
            const long long bound = int_pow(p, depth).convert_to<long long>();
            auto& column = table[static_cast<std::size_t>(i)];
            column.reserve(static_cast<std::size_t>(bound));
            for (long long c = 0; c < bound; ++c) {
                BigInt num = c;
                int exp = depth;
                while (num != 0 && num % p == 0) {
                    num /= p;
                    --exp;
                }
                if (num == 0) exp = 0;
                column.push_back(PruferComponent{std::move(num), exp});
            }
        }
        std::vector<std::size_t> counter(static_cast<std::size_t>(d), 0);
        for (;;) {
            PruferTuple t;
            t.reserve(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                t.push_back(table[static_cast<std::size_t>(i)][counter[static_cast<std::size_t>(i)]]);
            out.push_back(GroupElement::from_canonical_components(desc, std::move(t)));
            int pos = d - 1;
            while (pos >= 0 && ++counter[static_cast<std::size_t>(pos)] ==
                                   table[static_cast<std::size_t>(pos)].size()) {
                counter[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<GroupElement> ball(const FiltrationSpec& spec, Value gamma, bool closed) {
    if (gamma.is_infinity())
        return closed ? std::vector<GroupElement>{GroupElement::zero(spec.descriptor())}
                      : std::vector<GroupElement>{};
    const int k = gamma.index();
    if (closed) return enumerate_truncation(spec, k);
    return enumerate_truncation(spec, k - 1); // G_{-1} = {0}
}

std::vector<GroupElement> fibre(const FiltrationSpec& spec, int level) {
    auto all = enumerate_truncation(spec, level);
    std::vector<GroupElement> out;
    out.reserve(all.size());
    for (auto& x : all)
        if (value_of(spec, x) == Value::level(level)) out.push_back(std::move(x));
    return out;
}

BigInt jump_size(const FiltrationSpec& spec, int level) {
    return int_pow(spec.descriptor().prime, spec.jump_exponent(level));
}

bool r_m(const FiltrationSpec& spec, const BigInt& m, Value gamma) {
    if (gamma.is_infinity())
        throw StructuralError("R_m is a relation on Γ levels; Infinity rejected");
    if (m < 1) throw StructuralError("R_m requires m >= 1");
    return jump_size(spec, gamma.index()) > m;
}

std::optional<Value> f_n_eval(const FiltrationSpec& spec, long long n, Value gamma) {
    if (n < 1) throw StructuralError("f_n requires a positive n");
    if (gamma.is_infinity()) return Value::infinity();
    bool first = true;
    Value common = Value::infinity();
    for (const auto& x : fibre(spec, gamma.index())) {
        Value v = value_of(spec, scalar_mul(n, x));
        if (first) {
            common = v;
            first = false;
        } else if (v != common) {
            return std::nullopt;
        }
    }
    return common;
}

int eventual_shift(const FiltrationSpec& spec) {
    if (spec.descriptor().kind == GroupKind::ElemAbelian) return 0;
    const long long p = spec.descriptor().prime;
    const int h = spec.horizon();
    const int P = spec.period_length();
    int shift = -1;
    for (int k = h; k <= h + 2 * P; ++k) {
        auto v = f_n_eval(spec, p, Value::level(k));
        if (!v)
            throw SpecIntegrityError("f_p is not well-defined at level " + std::to_string(k) +
                                     ", beyond the prefix region");
        if (v->is_infinity())
            throw SpecIntegrityError("f_p maps level " + std::to_string(k) +
                                     " to Infinity beyond the prefix region");
        const int drop = k - v->index();
        if (shift == -1) shift = drop;
        if (drop != shift)
            throw SpecIntegrityError("f_p is not an exact shift beyond the horizon (drop " +
                                     std::to_string(drop) + " at level " + std::to_string(k) +
                                     ", expected " + std::to_string(shift) + ")");
    }
    return shift;
}

AxiomReport check_axioms(const FiltrationSpec& spec, int K) {
    if (K < spec.horizon())
        throw StructuralError("check_axioms needs K >= horizon(spec)");
    const long long p = spec.descriptor().prime;
    AxiomReport report;
    report.truncation = K;
    report.horizon = spec.horizon();

    const auto elements = enumerate_truncation(spec, K);
    const std::size_t n = elements.size();
    std::vector<Value> val(n), vpx(n);
    std::vector<bool> px_zero(n), divisible(n);
    const bool elem = spec.descriptor().kind == GroupKind::ElemAbelian;
    for (std::size_t i = 0; i < n; ++i) {
        val[i] = value_of(spec, elements[i]);
        GroupElement px = scalar_mul(p, elements[i]);
        px_zero[i] = px.is_zero();
        vpx[i] = value_of(spec, px);
        // axiom (5) existence side: is x p-divisible in G (not just in G_K)?
        divisible[i] = elem ? elements[i].is_zero() : !divide(p, elements[i]).empty();
    }

    const Value prefix_floor = Value::level(report.horizon - 1);
    auto classify_generic = [&](AxiomStatus& st) {
        if (st.exceptions.empty()) {
            st.kind = AxiomStatus::Kind::Holds;
            return;
        }
        st.kind = AxiomStatus::Kind::HoldsGenerically;
    };

    // (1) v(x) = inf iff x = 0
    for (std::size_t i = 0; i < n; ++i)
        if (val[i].is_infinity() != elements[i].is_zero())
            report.axiom[0].exceptions.emplace_back(elements[i], elements[i]);
    report.axiom[0].kind = report.axiom[0].exceptions.empty() ? AxiomStatus::Kind::Holds
                                                              : AxiomStatus::Kind::Fails;

    // (2) v(x - y) >= min(v(x), v(y))
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (value_of(spec, sub(elements[i], elements[j])) < value_min(val[i], val[j]))
                report.axiom[1].exceptions.emplace_back(elements[i], elements[j]);
    report.axiom[1].kind = report.axiom[1].exceptions.empty() ? AxiomStatus::Kind::Holds
                                                              : AxiomStatus::Kind::Fails;

    // (3) v(px) < v(py) -> v(x) < v(y)   (generic)
    // (4) v(x) < v(y) -> v(px) < v(py) or px = 0   (generic)
    // (5) v(x) < v(py) or x is p-divisible   (generic)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (vpx[i] < vpx[j] && !(val[i] < val[j]))
                report.axiom[2].exceptions.emplace_back(elements[i], elements[j]);
            if (val[i] < val[j] && !(vpx[i] < vpx[j] || px_zero[i]))
                report.axiom[3].exceptions.emplace_back(elements[i], elements[j]);
            if (!divisible[i] && !(val[i] < vpx[j]))
                report.axiom[4].exceptions.emplace_back(elements[i], elements[j]);
        }
    }
    for (int a = 2; a <= 4; ++a) {
        classify_generic(report.axiom[static_cast<std::size_t>(a)]);
        for (const auto& [x, y] : report.axiom[static_cast<std::size_t>(a)].exceptions) {
            // both witnesses must sit inside the prefix region
            Value vx = value_of(spec, x), vy = value_of(spec, y);
            if (!(vx >= prefix_floor && vy >= prefix_floor)) {
                report.axiom[static_cast<std::size_t>(a)].kind = AxiomStatus::Kind::Fails;
                break;
            }
        }
    }
    return report;
}

std::vector<GroupElement> torsion_subgroup(const FiltrationSpec& spec, long long n, int K) {
    const auto& desc = spec.descriptor();
    const int nu = padic_valuation(n, desc.prime);
    if (desc.kind == GroupKind::ElemAbelian) {
        if (nu > 0) return enumerate_truncation(spec, K); // exponent p: G[n] = G
        return {GroupElement::zero(desc)};
    }
    auto kernel = torsion_subgroup(desc, n);
    std::vector<GroupElement> out;
    for (auto& x : kernel)
        if (value_of(spec, x) >= Value::level(K)) out.push_back(std::move(x));
    return out;
}

} // namespace valgroup
