#include "valgroup/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace valgroup {

GroupTerm GroupTerm::make(const GroupDescriptor& desc, long long coeff, GroupElement offset) {
    if (!(offset.descriptor() == desc))
        throw StructuralError("term offset belongs to a different group");
    if (desc.kind == GroupKind::ElemAbelian)
        coeff = ((coeff % desc.prime) + desc.prime) % desc.prime;
    return GroupTerm{coeff, std::move(offset)};
}

namespace {

using Node = Formula::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_atom(Formula::AtomKind kind, long long rm_bound, std::vector<GroupTerm> terms) {
    auto n = std::make_shared<Node>();
    n->op = Formula::Op::Atom;
    n->atom = kind;
    n->rm_bound = rm_bound;
    n->terms = std::move(terms);
    return n;
}

NodePtr make_inner(Formula::Op op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

} // namespace

Formula Formula::value_leq(const GroupDescriptor& desc, GroupTerm t, GroupTerm s) {
    t = GroupTerm::make(desc, t.coeff_x, std::move(t.offset));
    s = GroupTerm::make(desc, s.coeff_x, std::move(s.offset));
    return Formula(desc, make_atom(AtomKind::ValueLeq, 0, {std::move(t), std::move(s)}));
}

Formula Formula::is_inf(const GroupDescriptor& desc, GroupTerm t) {
    t = GroupTerm::make(desc, t.coeff_x, std::move(t.offset));
    return Formula(desc, make_atom(AtomKind::IsInf, 0, {std::move(t)}));
}

Formula Formula::r_m(const GroupDescriptor& desc, long long m, GroupTerm t) {
    if (m < 1) throw StructuralError("R_m requires m >= 1");
    t = GroupTerm::make(desc, t.coeff_x, std::move(t.offset));
    return Formula(desc, make_atom(AtomKind::Rm, m, {std::move(t)}));
}

Formula Formula::negation(Formula f) {
    return Formula(f.desc_, make_inner(Op::Not, f.root_, nullptr));
}

Formula Formula::conjunction(Formula a, Formula b) {
    if (!(a.desc_ == b.desc_)) throw StructuralError("mixed-group formula");
    return Formula(a.desc_, make_inner(Op::And, a.root_, b.root_));
}

Formula Formula::disjunction(Formula a, Formula b) {
    if (!(a.desc_ == b.desc_)) throw StructuralError("mixed-group formula");
    return Formula(a.desc_, make_inner(Op::Or, a.root_, b.root_));
}

// ---------------------------------------------------------------------------
// Canonical printer.

namespace {

std::string print_offset(const GroupElement& h) {
    const auto& desc = h.descriptor();
    if (desc.kind == GroupKind::PruferProduct) {
        std::ostringstream os;
        os << "q(";
        for (std::size_t i = 0; i < h.components().size(); ++i) {
            const auto& c = h.components()[i];
            if (i) os << "; ";
            os << c.num << "," << int_pow(desc.prime, c.exp);
        }
        os << ")";
        return os.str();
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& b : h.support()) {
        if (!first) os << " + ";
        first = false;
        if (b.coeff != 1) os << b.coeff << "*";
        os << "e(" << b.level << "," << b.slot << ")";
    }
    return os.str();
}

std::string print_term(const GroupTerm& t) {
    std::string coeff_part;
    if (t.coeff_x == 1)
        coeff_part = "x";
    else if (t.coeff_x != 0)
        coeff_part = std::to_string(t.coeff_x) + "*x";
    if (t.offset.is_zero()) return coeff_part.empty() ? "0" : coeff_part;
    std::string off = print_offset(t.offset);
    return coeff_part.empty() ? off : coeff_part + " + " + off;
}

int precedence(Formula::Op op) {
    switch (op) {
        case Formula::Op::Or: return 1;
        case Formula::Op::And: return 2;
        case Formula::Op::Not: return 3;
        case Formula::Op::Atom: return 4;
    }
    return 4;
}

std::string print_node(const Node& n, int parent_prec) {
    std::string s;
    switch (n.op) {
        case Formula::Op::Atom:
            switch (n.atom) {
                case Formula::AtomKind::ValueLeq:
                    s = "v(" + print_term(n.terms[0]) + ") <= v(" + print_term(n.terms[1]) + ")";
                    break;
                case Formula::AtomKind::IsInf:
                    s = "v(" + print_term(n.terms[0]) + ") = inf";
                    break;
                case Formula::AtomKind::Rm:
                    s = "R_" + std::to_string(n.rm_bound) + "(v(" + print_term(n.terms[0]) + "))";
                    break;
            }
            break;
        case Formula::Op::Not:
            s = "!" + print_node(*n.lhs, precedence(Formula::Op::Not));
            break;
        case Formula::Op::And:
            s = print_node(*n.lhs, precedence(Formula::Op::And)) + " & " +
                print_node(*n.rhs, precedence(Formula::Op::And));
            break;
        case Formula::Op::Or:
            s = print_node(*n.lhs, precedence(Formula::Op::Or)) + " | " +
                print_node(*n.rhs, precedence(Formula::Op::Or));
            break;
    }
    if (precedence(n.op) < parent_prec) return "(" + s + ")";
    return s;
}

} // namespace

std::string Formula::print() const { return print_node(*root_, 0); }

// ---------------------------------------------------------------------------
// Parser.

namespace {

struct Token {
    enum class Type { Int, Word, Sym, End };
    Type type = Type::End;
    long long ival = 0;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw FormulaParseError(tok_.pos, message);
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        tok_ = Token{};
        tok_.pos = i_;
        if (i_ >= text_.size()) return;
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.type = Token::Type::Int;
            std::size_t j = i_;
            while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
            tok_.text = std::string(text_.substr(i_, j - i_));
            tok_.ival = std::stoll(tok_.text);
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok_.type = Token::Type::Word;
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                ++j;
            tok_.text = std::string(text_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        tok_.type = Token::Type::Sym;
        if ((c == '<' || c == '>') && i_ + 1 < text_.size() && text_[i_ + 1] == '=') {
            tok_.text = std::string(text_.substr(i_, 2));
            i_ += 2;
            return;
        }
        static const std::string singles = "()*+-,;=!&|<>";
        if (singles.find(c) == std::string::npos)
            throw FormulaParseError(i_, std::string("unexpected character '") + c + "'");
        tok_.text = std::string(1, c);
        ++i_;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, const GroupDescriptor& desc, const ParamEnv& params,
           std::vector<std::string>* notes)
        : lex_(text), desc_(desc), params_(params), notes_(notes) {}

    Formula parse() {
        Formula f = parse_or();
        if (lex_.peek().type != Token::Type::End) lex_.fail("trailing input");
        return f;
    }

    GroupTerm parse_single_term() {
        GroupTerm t = parse_term();
        if (lex_.peek().type != Token::Type::End) lex_.fail("trailing input");
        return t;
    }

private:
    bool peek_sym(const char* s) const {
        return lex_.peek().type == Token::Type::Sym && lex_.peek().text == s;
    }
    bool peek_word(const char* s) const {
        return lex_.peek().type == Token::Type::Word && lex_.peek().text == s;
    }
    void expect_sym(const char* s) {
        if (!peek_sym(s)) lex_.fail(std::string("expected '") + s + "'");
        lex_.take();
    }
    long long expect_int() {
        bool neg = false;
        if (peek_sym("-")) {
            lex_.take();
            neg = true;
        }
        if (lex_.peek().type != Token::Type::Int) lex_.fail("expected an integer");
        long long v = lex_.take().ival;
        return neg ? -v : v;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (peek_sym("|")) {
            lex_.take();
            f = Formula::disjunction(std::move(f), parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (peek_sym("&")) {
            lex_.take();
            f = Formula::conjunction(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        if (peek_sym("!")) {
            lex_.take();
            return Formula::negation(parse_unary());
        }
        if (peek_sym("(")) {
            lex_.take();
            Formula f = parse_or();
            expect_sym(")");
            return f;
        }
        return parse_atom();
    }

    Formula parse_atom() {
        if (peek_word("v")) return parse_value_atom();
        const auto& t = lex_.peek();
        if (t.type == Token::Type::Word && t.text.size() > 2 && t.text.rfind("R_", 0) == 0) {
            std::string digits = t.text.substr(2);
            if (digits.find_first_not_of("0123456789") != std::string::npos)
                lex_.fail("malformed R_m atom");
            lex_.take();
            long long m = std::stoll(digits);
            expect_sym("(");
            if (!peek_word("v")) lex_.fail("R_m applies to a value, expected v(");
            lex_.take();
            expect_sym("(");
            GroupTerm term = parse_term();
            expect_sym(")");
            expect_sym(")");
            return Formula::r_m(desc_, m, std::move(term));
        }
        // term equation T = S, sugar for v(T - S) = inf
        GroupTerm a = parse_term();
        expect_sym("=");
        GroupTerm b = parse_term();
        GroupTerm diff = GroupTerm::make(desc_, a.coeff_x - b.coeff_x, sub(a.offset, b.offset));
        return Formula::is_inf(desc_, std::move(diff));
    }

    Formula parse_value_atom() {
        lex_.take(); // v
        expect_sym("(");
        GroupTerm t = parse_term();
        expect_sym(")");
        if (lex_.peek().type != Token::Type::Sym) lex_.fail("expected a comparison");
        const std::string cmp = lex_.take().text;
        if (cmp == "=" && peek_word("inf")) {
            lex_.take();
            return Formula::is_inf(desc_, std::move(t));
        }
        if (!peek_word("v")) lex_.fail("expected v( on the right-hand side");
        lex_.take();
        expect_sym("(");
        GroupTerm s = parse_term();
        expect_sym(")");
        if (cmp == "<=") return Formula::value_leq(desc_, std::move(t), std::move(s));
        if (cmp == ">=") return Formula::value_leq(desc_, std::move(s), std::move(t));
        if (cmp == "<")
            return Formula::negation(Formula::value_leq(desc_, std::move(s), std::move(t)));
        if (cmp == ">")
            return Formula::negation(Formula::value_leq(desc_, std::move(t), std::move(s)));
        if (cmp == "=")
            return Formula::conjunction(Formula::value_leq(desc_, t, s),
                                        Formula::value_leq(desc_, s, t));
        lex_.fail("unknown comparison '" + cmp + "'");
    }

    struct TermAcc {
        long long coeff = 0;
        GroupElement offset;
    };

    GroupTerm parse_term() {
        TermAcc acc{0, GroupElement::zero(desc_)};
        long long sign = 1;
        if (peek_sym("-")) {
            lex_.take();
            sign = -1;
        } else if (peek_sym("+")) {
            lex_.take();
        }
        parse_addend(acc, sign);
        while (peek_sym("+") || peek_sym("-")) {
            sign = lex_.take().text == "-" ? -1 : 1;
            parse_addend(acc, sign);
        }
        long long raw = acc.coeff;
        GroupTerm out = GroupTerm::make(desc_, acc.coeff, std::move(acc.offset));
        if (notes_ && desc_.kind == GroupKind::ElemAbelian && out.coeff_x != raw)
            notes_->push_back("coefficient " + std::to_string(raw) + " normalized to " +
                              std::to_string(out.coeff_x) + " (mod " +
                              std::to_string(desc_.prime) + ")");
        return out;
    }

    void parse_addend(TermAcc& acc, long long sign) {
        long long scale = sign;
        if (lex_.peek().type == Token::Type::Int) {
            long long k = lex_.take().ival;
            if (peek_sym("*")) {
                lex_.take();
                scale = sign * k;
            } else {
                if (k != 0) lex_.fail("a bare integer is not a group element (only 0)");
                return; // the zero element contributes nothing
            }
        }
        parse_primary(acc, scale);
    }

    void parse_primary(TermAcc& acc, long long scale) {
        if (lex_.peek().type != Token::Type::Word) lex_.fail("expected x, q(...), e(...) or p<name>");
        const Token word = lex_.take();
        if (word.text == "x") {
            acc.coeff += scale;
            return;
        }
        if (word.text == "q") {
            if (desc_.kind != GroupKind::PruferProduct)
                throw FormulaParseError(word.pos, "q(...) literals need a Prüfer-product group");
            expect_sym("(");
            std::vector<std::pair<BigInt, int>> comps;
            for (;;) {
                long long num = expect_int();
                expect_sym(",");
                long long den = expect_int();
                int exp = 0;
                long long d = den;
                while (d > 1 && d % desc_.prime == 0) {
                    d /= desc_.prime;
                    ++exp;
                }
                if (d != 1 || den < 1)
                    throw FormulaParseError(word.pos, "denominator " + std::to_string(den) +
                                                          " is not a power of " +
                                                          std::to_string(desc_.prime));
                comps.emplace_back(num, exp);
                if (peek_sym(";")) {
                    lex_.take();
                    continue;
                }
                break;
            }
            expect_sym(")");
            if (comps.size() != static_cast<std::size_t>(desc_.factor_count))
                throw FormulaParseError(word.pos,
                                        "expected " + std::to_string(desc_.factor_count) +
                                            " components, got " + std::to_string(comps.size()));
            acc.offset = add(acc.offset, scalar_mul(scale, GroupElement::prufer(desc_, comps)));
            return;
        }
        if (word.text == "e") {
            if (desc_.kind != GroupKind::ElemAbelian)
                throw FormulaParseError(word.pos, "e(...) literals need an elementary abelian group");
            expect_sym("(");
            long long level = expect_int();
            expect_sym(",");
            long long slot = expect_int();
            expect_sym(")");
            if (level < 0 || slot < 0)
                throw FormulaParseError(word.pos, "basis indices must be non-negative");
            acc.offset = add(acc.offset,
                             scalar_mul(scale, GroupElement::basis(desc_, static_cast<int>(level),
                                                                   static_cast<int>(slot))));
            return;
        }
        if (word.text.size() > 1 && word.text[0] == 'p') {
            const std::string name = word.text.substr(1);
            auto it = params_.find(name);
            if (it == params_.end())
                throw FormulaParseError(word.pos, "unknown parameter p" + name);
            if (!(it->second.descriptor() == desc_))
                throw FormulaParseError(word.pos, "parameter p" + name + " is from another group");
            acc.offset = add(acc.offset, scalar_mul(scale, it->second));
            return;
        }
        throw FormulaParseError(word.pos, "unexpected word '" + word.text + "'");
    }

    Lexer lex_;
    GroupDescriptor desc_;
    const ParamEnv& params_;
    std::vector<std::string>* notes_;
};

} // namespace

Formula parse_formula(std::string_view text, const GroupDescriptor& desc, const ParamEnv& params,
                      std::vector<std::string>* notes) {
    desc.validate();
    return Parser(text, desc, params, notes).parse();
}

GroupElement parse_element(std::string_view text, const GroupDescriptor& desc) {
    desc.validate();
    ParamEnv empty;
    GroupTerm t = Parser(text, desc, empty, nullptr).parse_single_term();
    if (t.coeff_x != 0)
        throw FormulaParseError(0, "an element literal cannot mention the variable x");
    return t.offset;
}

// ---------------------------------------------------------------------------
// Direct semantics.

namespace {

bool eval_node(const Node& n, const GroupElement& a, const FiltrationSpec& spec) {
    switch (n.op) {
        case Formula::Op::Not: return !eval_node(*n.lhs, a, spec);
        case Formula::Op::And: return eval_node(*n.lhs, a, spec) && eval_node(*n.rhs, a, spec);
        case Formula::Op::Or: return eval_node(*n.lhs, a, spec) || eval_node(*n.rhs, a, spec);
        case Formula::Op::Atom: break;
    }
    auto term_value = [&](const GroupTerm& t) -> GroupElement {
        if (t.coeff_x == 0) return t.offset;
        GroupElement scaled = scalar_mul(t.coeff_x, a);
        return t.offset.is_zero() ? scaled : add(scaled, t.offset);
    };
    switch (n.atom) {
        case Formula::AtomKind::ValueLeq:
            return value_of(spec, term_value(n.terms[0])) <= value_of(spec, term_value(n.terms[1]));
        case Formula::AtomKind::IsInf:
            return term_value(n.terms[0]).is_zero();
        case Formula::AtomKind::Rm: {
            Value v = value_of(spec, term_value(n.terms[0]));
            if (v.is_infinity()) return false; // residue at infinity is trivial
            return jump_size(spec, v.index()) > n.rm_bound;
        }
    }
    return false;
}

} // namespace

bool eval_point(const Formula& phi, const GroupElement& a, const FiltrationSpec& spec) {
    if (!(phi.descriptor() == spec.descriptor()) || !(a.descriptor() == spec.descriptor()))
        throw StructuralError("formula, point and filtration must share one group");
    return eval_node(phi.root(), a, spec);
}

std::vector<GroupElement> extension(const Formula& phi, const FiltrationSpec& spec, int K) {
    std::vector<GroupElement> out;
    for (auto& a : enumerate_truncation(spec, K))
        if (eval_point(phi, a, spec)) out.push_back(std::move(a));
    return out;
}

// ---------------------------------------------------------------------------
// Normal-form reduction.

namespace {

void collect_atoms(const Node& n, std::vector<const Node*>& atoms) {
    if (n.op == Formula::Op::Atom) {
        atoms.push_back(&n);
        return;
    }
    if (n.lhs) collect_atoms(*n.lhs, atoms);
    if (n.rhs) collect_atoms(*n.rhs, atoms);
}

} // namespace

/// Level-wise evaluation of the reduced one-variable condition.
class ReducedEvaluator {
public:
    explicit ReducedEvaluator(const ReducedFormula& r) : r_(r) {}

    std::optional<bool> eval(const Node& n, int k) const {
        switch (n.op) {
            case Formula::Op::Not: {
                auto v = eval(*n.lhs, k);
                if (!v) return std::nullopt;
                return !*v;
            }
            case Formula::Op::And: {
                auto a = eval(*n.lhs, k), b = eval(*n.rhs, k);
                if (!a || !b) return std::nullopt;
                return *a && *b;
            }
            case Formula::Op::Or: {
                auto a = eval(*n.lhs, k), b = eval(*n.rhs, k);
                if (!a || !b) return std::nullopt;
                return *a || *b;
            }
            case Formula::Op::Atom: break;
        }
        switch (n.atom) {
            case Formula::AtomKind::ValueLeq: {
                auto a = term_gamma(n.terms[0], k), b = term_gamma(n.terms[1], k);
                if (!a || !b) return std::nullopt;
                return *a <= *b;
            }
            case Formula::AtomKind::IsInf: {
                auto a = term_gamma(n.terms[0], k);
                if (!a) return std::nullopt;
                return a->is_infinity();
            }
            case Formula::AtomKind::Rm: {
                auto a = term_gamma(n.terms[0], k);
                if (!a) return std::nullopt;
                if (a->is_infinity()) return false;
                return jump_size(r_.spec_, a->index()) > n.rm_bound;
            }
        }
        return std::nullopt;
    }

    /// γ contribution of one term at Level(k): the constant v(h) for a
    /// constant term, f_n(Level(k)) otherwise.
    std::optional<Value> term_gamma(const GroupTerm& t, int k) const {
        if (t.coeff_x == 0) return value_of(r_.spec_, t.offset);
        const auto& desc = r_.spec_.descriptor();
        if (desc.kind == GroupKind::ElemAbelian) return Value::level(k); // unit coefficient
        int nu = padic_valuation(t.coeff_x, desc.prime);
        Value g = Value::level(k);
        for (int step = 0; step < nu; ++step) {
            if (g.is_infinity()) return g;
            if (g.index() >= r_.regime_floor_) {
                g = Value::level(g.index() - r_.shift_);
                continue;
            }
            auto scanned = f_n_eval(r_.spec_, desc.prime, g);
            if (!scanned) return std::nullopt;
            g = *scanned;
        }
        return g;
    }

private:
    const ReducedFormula& r_;
};

std::optional<bool> ReducedFormula::eval_at_level(int k) const {
    return ReducedEvaluator(*this).eval(*root_, k);
}

namespace {

std::string render_side(const FiltrationSpec& spec, const GroupTerm& t) {
    if (t.coeff_x == 0) return value_of(spec, t.offset).to_text();
    const auto& desc = spec.descriptor();
    const int nu =
        desc.kind == GroupKind::ElemAbelian ? 0 : padic_valuation(t.coeff_x, desc.prime);
    if (nu == 0) return "v(x)";
    return "f_" + int_pow(desc.prime, nu).str() + "(v(x))";
}

std::string render_node(const FiltrationSpec& spec, const Node& n, int parent_prec) {
    std::string s;
    switch (n.op) {
        case Formula::Op::Atom:
            switch (n.atom) {
                case Formula::AtomKind::ValueLeq:
                    s = render_side(spec, n.terms[0]) + " <= " + render_side(spec, n.terms[1]);
                    break;
                case Formula::AtomKind::IsInf:
                    s = render_side(spec, n.terms[0]) + " = inf";
                    break;
                case Formula::AtomKind::Rm:
                    s = "R_" + std::to_string(n.rm_bound) + "(" + render_side(spec, n.terms[0]) +
                        ")";
                    break;
            }
            break;
        case Formula::Op::Not:
            s = "!" + render_node(spec, *n.lhs, precedence(Formula::Op::Not));
            break;
        case Formula::Op::And:
            s = render_node(spec, *n.lhs, precedence(Formula::Op::And)) + " & " +
                render_node(spec, *n.rhs, precedence(Formula::Op::And));
            break;
        case Formula::Op::Or:
            s = render_node(spec, *n.lhs, precedence(Formula::Op::Or)) + " | " +
                render_node(spec, *n.rhs, precedence(Formula::Op::Or));
            break;
    }
    if (precedence(n.op) < parent_prec) return "(" + s + ")";
    return s;
}

} // namespace

std::string ReducedFormula::render() const { return render_node(spec_, *root_, 0); }

ReducedFormula reduce(const Formula& phi, const FiltrationSpec& spec) {
    if (!(phi.descriptor() == spec.descriptor()))
        throw StructuralError("formula and filtration must share one group");
    ReducedFormula r(spec);
    r.root_ = phi.root_ptr();
    r.shift_ = eventual_shift(spec);
    r.regime_floor_ = spec.horizon();

    std::vector<const Node*> atoms;
    collect_atoms(phi.root(), atoms);
    std::vector<GroupElement> x_set;
    for (const Node* a : atoms) {
        for (const GroupTerm& t : a->terms) {
            if (t.coeff_x == 0) {
                if (!t.offset.is_zero())
                    r.max_offset_level_ =
                        std::max(r.max_offset_level_, value_of(spec, t.offset).index());
                continue;
            }
            const long long p = spec.descriptor().prime;
            const int nu = spec.descriptor().kind == GroupKind::ElemAbelian
                               ? 0
                               : padic_valuation(t.coeff_x, p);
            r.max_nu_ = std::max(r.max_nu_, nu);
            if (!t.offset.is_zero())
                r.max_offset_level_ =
                    std::max(r.max_offset_level_, value_of(spec, t.offset).index());
            // X_i = {g : v(n g) >= v(h)} = preimage of the closed ball at v(h)
            // under multiplication by n
            const Value vh = value_of(spec, t.offset);
            for (const auto& b : ball(spec, vh, true)) {
                const long long n = t.coeff_x;
                auto sols = divide(n < 0 ? -n : n, n < 0 ? negate(b) : b);
                x_set.insert(x_set.end(), sols.begin(), sols.end());
            }
        }
    }
    std::sort(x_set.begin(), x_set.end());
    x_set.erase(std::unique(x_set.begin(), x_set.end()), x_set.end());
    r.exceptional_ = std::move(x_set);
    return r;
}

bool Verdict::is_member(const GroupElement& x) const {
    const bool listed = std::binary_search(elements.begin(), elements.end(), x);
    return kind == Kind::Finite ? listed : !listed;
}

Verdict classify(const Formula& phi, const FiltrationSpec& spec) {
    ReducedFormula r = reduce(phi, spec);
    const int prefix_len = spec.prefix_length();
    const int period = spec.period_length();

    // Safe horizon: beyond it every rewrite is valid, every f operates in the
    // exact-shift regime and X lives inside G_{K*}.
    int safe = std::max(r.max_offset_level(), prefix_len) + r.shift() * (1 + r.max_coeff_valuation()) +
               2 * period;
    if (spec.tail_kind() == FiltrationSpec::TailKind::Affine) {
        // affine tails settle R_m atoms once the growing jump clears m
        std::vector<const Formula::Node*> atoms;
        collect_atoms(phi.root(), atoms);
        for (const auto* a : atoms) {
            if (a->atom != Formula::AtomKind::Rm || a->op != Formula::Op::Atom) continue;
            int k = prefix_len;
            while (jump_size(spec, k) <= a->rm_bound) ++k;
            safe = std::max(safe, k + 1);
        }
    }

    for (const auto& x : r.exceptional_set())
        if (value_of(spec, x) < Value::level(safe))
            throw SpecIntegrityError("exceptional set escapes the safe horizon");

    std::vector<bool> window;
    for (int k = safe; k <= safe + period; ++k) {
        auto v = r.eval_at_level(k);
        if (!v)
            throw SpecIntegrityError("f_n undefined beyond the horizon at level " +
                                     std::to_string(k));
        window.push_back(*v);
    }
    const bool eventual = window.front();
    for (bool w : window)
        if (w != eventual) throw EventualNotConstantError(safe, window);

    Verdict verdict;
    verdict.kind = eventual ? Verdict::Kind::Cofinite : Verdict::Kind::Finite;
    // Pointwise evaluation is only needed on the irregular region: beyond the
    // horizon and the exceptional set, every fibre is uniform and follows the
    // reduced condition, so whole fibres are included or skipped at once.
    int irregular = spec.horizon();
    for (const auto& x : r.exceptional_set()) {
        const Value v = value_of(spec, x);
        if (!v.is_infinity()) irregular = std::max(irregular, v.index());
    }
    for (auto& a : enumerate_truncation(spec, irregular))
        if (eval_point(phi, a, spec) != eventual) verdict.elements.push_back(std::move(a));
    for (int k = irregular + 1; k <= safe; ++k) {
        const auto level_truth = r.eval_at_level(k);
        if (!level_truth) {
            // a shift stage dipped into a prefix irregularity: fall back to points
            for (auto& a : fibre(spec, k))
                if (eval_point(phi, a, spec) != eventual) verdict.elements.push_back(std::move(a));
            continue;
        }
        if (*level_truth != eventual)
            for (auto& a : fibre(spec, k)) verdict.elements.push_back(std::move(a));
    }
    std::sort(verdict.elements.begin(), verdict.elements.end());
    verdict.trace = ReductionTrace{r.exceptional_set(), safe, eventual, r.render()};
    return verdict;
}

// ---------------------------------------------------------------------------
// Deterministic random generation (corroboration runs).

GroupElement random_element(std::mt19937_64& rng, const FiltrationSpec& spec, int K) {
    const auto& desc = spec.descriptor();
    if (desc.kind == GroupKind::ElemAbelian) {
        ElemSupport supp;
        for (int k = 0; k <= K; ++k)
            for (int s = 0; s < spec.multiplicity_at(k); ++s) {
                const long long c = static_cast<long long>(rng() % static_cast<unsigned long long>(desc.prime));
                if (c != 0) supp.push_back({k, s, c});
            }
        return GroupElement::from_support(desc, std::move(supp));
    }
    std::vector<std::pair<BigInt, int>> comps;
    for (int i = 0; i < desc.factor_count; ++i) {
        const int depth = spec.depth_at(i, K);
        const unsigned long long bound = int_pow(desc.prime, depth).convert_to<unsigned long long>();
        comps.emplace_back(BigInt(rng() % bound), depth);
    }
    return GroupElement::prufer(desc, std::move(comps));
}

namespace {

GroupTerm random_term(std::mt19937_64& rng, const FiltrationSpec& spec,
                      const FormulaGenOptions& opts) {
    const long long coeff =
        static_cast<long long>(rng() % static_cast<unsigned long long>(2 * opts.max_abs_coeff + 1)) -
        opts.max_abs_coeff;
    GroupElement offset = (rng() % 2 == 0) ? GroupElement::zero(spec.descriptor())
                                           : random_element(rng, spec, opts.param_truncation);
    return GroupTerm::make(spec.descriptor(), coeff, std::move(offset));
}

Formula random_node(std::mt19937_64& rng, const FiltrationSpec& spec,
                    const FormulaGenOptions& opts, int depth) {
    const auto& desc = spec.descriptor();
    const unsigned long long roll = rng() % 10;
    if (depth <= 0 || roll < 4) {
        const unsigned long long kind = rng() % 10;
        if (kind < 4)
            return Formula::value_leq(desc, random_term(rng, spec, opts),
                                      random_term(rng, spec, opts));
        if (kind < 7) {
            const long long max_m = int_pow(desc.prime, 3).convert_to<long long>();
            const long long m = 1 + static_cast<long long>(rng() % static_cast<unsigned long long>(max_m));
            return Formula::r_m(desc, m, random_term(rng, spec, opts));
        }
        return Formula::is_inf(desc, random_term(rng, spec, opts));
    }
    if (roll < 6) return Formula::negation(random_node(rng, spec, opts, depth - 1));
    Formula a = random_node(rng, spec, opts, depth - 1);
    Formula b = random_node(rng, spec, opts, depth - 1);
    if (roll < 8) return Formula::conjunction(std::move(a), std::move(b));
    return Formula::disjunction(std::move(a), std::move(b));
}

} // namespace

Formula random_formula(std::mt19937_64& rng, const FiltrationSpec& spec,
                       const FormulaGenOptions& opts) {
    return random_node(rng, spec, opts, opts.max_depth);
}

} // namespace valgroup
