#include "thetaforge/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <stdexcept>

namespace thetaforge {

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
      line(line), col(col) {}

namespace {

const std::set<std::string> kReserved = {"f", "phi", "psi", "chi", "fq",
                                         "poch", "jt", "latsum", "q"};

struct Token {
    enum class Kind { Ident, Int, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    long long value = 0;
    char punct = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : s_(text) { scan(); }

    const std::vector<Token>& tokens() const { return toks_; }

private:
    void scan() {
        int line = 1, col = 1;
        size_t i = 0;
        auto advance = [&](size_t k) {
            for (size_t j = 0; j < k; ++j) {
                if (s_[i + j] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            i += k;
        };
        while (i < s_.size()) {
            char c = s_[i];
            if (c == '#') {
                size_t j = i;
                while (j < s_.size() && s_[j] != '\n') ++j;
                advance(j - i);
                continue;
            }
            if (std::isspace((unsigned char)c)) {
                advance(1);
                continue;
            }
            Token t;
            t.line = line;
            t.col = col;
            if (std::isdigit((unsigned char)c)) {
                size_t j = i;
                while (j < s_.size() && std::isdigit((unsigned char)s_[j])) ++j;
                t.kind = Token::Kind::Int;
                t.text = s_.substr(i, j - i);
                t.value = std::stoll(t.text);
                advance(j - i);
            } else if (std::isalpha((unsigned char)c) || c == '_') {
                size_t j = i;
                while (j < s_.size() &&
                       (std::isalnum((unsigned char)s_[j]) || s_[j] == '_'))
                    ++j;
                t.kind = Token::Kind::Ident;
                t.text = s_.substr(i, j - i);
                advance(j - i);
            } else if (std::strchr("^*+-();,{}|/=:@", c)) {
                t.kind = Token::Kind::Punct;
                t.punct = c;
                t.text = std::string(1, c);
                advance(1);
            } else {
                throw ParseError("unexpected character '" + std::string(1, c) + "'", line, col);
            }
            toks_.push_back(std::move(t));
        }
        Token end;
        end.kind = Token::Kind::End;
        end.line = line;
        end.col = col;
        toks_.push_back(end);
    }

    std::string s_;
    std::vector<Token> toks_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    AstPtr parse_full_expr() {
        AstPtr e = expr();
        expect_end();
        return e;
    }

    AstPtr expr() {
        std::vector<std::pair<int, AstPtr>> terms;
        int sign = 1;
        if (is_punct('-')) {
            sign = -1;
            ++pos_;
        }
        terms.emplace_back(sign, term());
        while (is_punct('+') || is_punct('-')) {
            int s = peek().punct == '+' ? 1 : -1;
            ++pos_;
            terms.emplace_back(s, term());
        }
        if (terms.size() == 1 && terms[0].first == 1) return terms[0].second;
        return Ast::sum(std::move(terms));
    }

    void expect_end() {
        if (peek().kind != Token::Kind::End)
            fail("trailing input after expression");
    }

    bool at_end() const { return toks()[pos_].kind == Token::Kind::End; }
    const Token& peek(int off = 0) const { return toks()[std::min(pos_ + off, toks().size() - 1)]; }
    size_t position() const { return pos_; }
    void seek(size_t p) { pos_ = p; }

private:
    const std::vector<Token>& toks() const { return lex_.tokens(); }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw ParseError(msg, t.line, t.col);
    }

    bool is_punct(char c, int off = 0) const {
        const Token& t = peek(off);
        return t.kind == Token::Kind::Punct && t.punct == c;
    }
    bool is_ident(const char* name, int off = 0) const {
        const Token& t = peek(off);
        return t.kind == Token::Kind::Ident && t.text == name;
    }

    void expect_punct(char c, const char* what) {
        if (!is_punct(c)) fail(std::string("expected '") + c + "' " + what);
        ++pos_;
    }

    AstPtr term() {
        std::vector<AstPtr> factors;
        factors.push_back(atom());
        while (is_punct('*')) {
            ++pos_;
            factors.push_back(atom());
        }
        if (factors.size() == 1) return factors[0];
        return Ast::product(std::move(factors));
    }

    bool starts_call() const {
        return peek().kind == Token::Kind::Ident && kReserved.count(peek().text) &&
               peek().text != "q" && is_punct('(', 1);
    }

    AstPtr atom() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Int) {
            ++pos_;
            return Ast::integer(t.value);
        }
        if (is_punct('(')) {
            ++pos_;
            AstPtr e = expr();
            expect_punct(')', "to close parenthesis");
            return e;
        }
        if (starts_call()) return call();
        if (t.kind == Token::Kind::Ident || is_punct('-')) return Ast::monomial(mono());
        fail("expected an integer, monomial, theta call, or parenthesized expression");
    }

    AstPtr call() {
        std::string name = peek().text;
        ++pos_;
        if (name == "latsum") return latsum_block();
        expect_punct('(', ("after '" + name + "'").c_str());
        Monomial a = mono();
        AstPtr node;
        if (name == "f") {
            expect_punct(',', "between theta arguments");
            Monomial b = mono();
            node = Ast::theta(std::move(a), std::move(b));
        } else if (name == "poch" || name == "jt") {
            expect_punct(';', "between pochhammer arguments");
            Monomial b = mono();
            node = Ast::call(name == "poch" ? Ast::Kind::Poch : Ast::Kind::Jt,
                             std::move(a), std::move(b));
        } else {
            Ast::Kind k = name == "phi"   ? Ast::Kind::Phi
                          : name == "psi" ? Ast::Kind::Psi
                          : name == "chi" ? Ast::Kind::Chi
                                          : Ast::Kind::Fq;
            node = Ast::call(k, std::move(a));
        }
        expect_punct(')', ("to close '" + name + "'").c_str());
        return node;
    }

    Monomial mono() {
        Monomial m = Monomial::one();
        if (is_punct('-')) {
            ++pos_;
            m = m.negated();
        }
        // The unit monomial is written '1' (as in f(1, q^2)).
        if (peek().kind == Token::Kind::Int && peek().value == 1) {
            ++pos_;
            return m;
        }
        m *= mono_factor();
        // Keep consuming '*factor' while the next atom is still a plain
        // monomial factor (not a call, integer, or parenthesized expression).
        while (is_punct('*') && peek(1).kind == Token::Kind::Ident && !starts_call_at(1)) {
            ++pos_;
            m *= mono_factor();
        }
        return m;
    }

    bool starts_call_at(int off) const {
        return peek(off).kind == Token::Kind::Ident && kReserved.count(peek(off).text) &&
               peek(off).text != "q" && is_punct('(', off + 1);
    }

    Monomial mono_factor() {
        const Token& t = peek();
        if (t.kind != Token::Kind::Ident) fail("expected a symbol or 'q'");
        std::string name = t.text;
        if (kReserved.count(name) && name != "q")
            fail("'" + name + "' is reserved and cannot be a symbol");
        ++pos_;
        Rational e(1);
        if (is_punct('^')) {
            ++pos_;
            e = rational();
        }
        if (name == "q") return Monomial::q_power(e);
        return Monomial::symbol(name, e);
    }

    Rational rational() {
        bool neg = false;
        if (is_punct('-')) {
            neg = true;
            ++pos_;
        }
        if (peek().kind != Token::Kind::Int) fail("expected an integer");
        long long num = peek().value;
        ++pos_;
        long long den = 1;
        if (is_punct('/')) {
            ++pos_;
            if (peek().kind != Token::Kind::Int) fail("expected a denominator");
            den = peek().value;
            ++pos_;
        }
        return Rational(neg ? -num : num, den);
    }

    // ---- latsum block ----

    AstPtr latsum_block() {
        expect_punct('(', "after 'latsum'");
        std::vector<std::string> indices;
        while (true) {
            if (peek().kind != Token::Kind::Ident) fail("expected an index name");
            indices.push_back(peek().text);
            ++pos_;
            if (is_punct(',')) {
                ++pos_;
                continue;
            }
            break;
        }
        expect_punct(')', "to close index list");
        expect_punct('{', "to open latsum block");
        int dim = int(indices.size());
        std::vector<LatticeSummand> summands;
        while (true) {
            summands.push_back(summand(indices));
            if (is_punct('|')) {
                ++pos_;
                continue;
            }
            break;
        }
        expect_punct('}', "to close latsum block");
        return Ast::lattice_sum(LatticeSum(dim, std::move(summands)));
    }

    LatticeSummand summand(const std::vector<std::string>& indices) {
        int dim = int(indices.size());
        LatticeSummand s;
        s.parity.assign(dim, 0);
        s.weight = IndexPoly::constant(dim, Rational(1));
        bool have_qexp = false;
        while (true) {
            if (peek().kind != Token::Kind::Ident)
                fail("expected a latsum field (sign/weight/qexp/pow)");
            std::string field = peek().text;
            ++pos_;
            if (field == "sign") {
                IndexPoly p = poly(indices);
                if (p.degree() > 1 || !p.integer_coeffs())
                    fail("sign must be an integer linear form");
                for (const auto& [e, c] : p.terms()) {
                    int idx = -1;
                    for (int k = 0; k < dim; ++k)
                        if (e[k] == 1) idx = k;
                    if (idx >= 0) s.parity[idx] = int(((c.num() % 2) + 2) % 2);
                }
            } else if (field == "weight") {
                s.weight = poly(indices);
            } else if (field == "qexp") {
                s.qexp = poly(indices);
                have_qexp = true;
            } else if (field == "pow") {
                if (peek().kind != Token::Kind::Ident) fail("expected a symbol after 'pow'");
                std::string sym = peek().text;
                if (kReserved.count(sym)) fail("'" + sym + "' is reserved");
                ++pos_;
                s.vmaps.emplace_back(sym, poly(indices));
            } else {
                fail("unknown latsum field '" + field + "'");
            }
            if (is_punct(';')) {
                ++pos_;
                continue;
            }
            break;
        }
        if (!have_qexp) fail("latsum summand is missing its qexp field");
        return s;
    }

    IndexPoly poly(const std::vector<std::string>& indices) {
        IndexPoly p = poly_term(indices);
        while (is_punct('+') || is_punct('-')) {
            bool minus = peek().punct == '-';
            ++pos_;
            IndexPoly t = poly_term(indices);
            if (minus)
                p -= t;
            else
                p += t;
        }
        return p;
    }

    IndexPoly poly_term(const std::vector<std::string>& indices) {
        int dim = int(indices.size());
        IndexPoly p = IndexPoly::constant(dim, Rational(1));
        if (is_punct('-')) {
            ++pos_;
            p = p.negated();
        }
        p = p * poly_factor(indices);
        while (is_punct('*')) {
            ++pos_;
            p = p * poly_factor(indices);
        }
        return p;
    }

    IndexPoly poly_factor(const std::vector<std::string>& indices) {
        int dim = int(indices.size());
        IndexPoly base;
        if (peek().kind == Token::Kind::Int) {
            long long v = peek().value;
            ++pos_;
            base = IndexPoly::constant(dim, Rational(v));
        } else if (peek().kind == Token::Kind::Ident) {
            auto it = std::find(indices.begin(), indices.end(), peek().text);
            if (it == indices.end()) fail("unknown index '" + peek().text + "'");
            ++pos_;
            base = IndexPoly::variable(dim, int(it - indices.begin()));
        } else if (is_punct('(')) {
            ++pos_;
            base = poly(indices);
            expect_punct(')', "to close polynomial");
        } else {
            fail("expected a polynomial factor");
        }
        if (is_punct('^')) {
            ++pos_;
            if (peek().kind != Token::Kind::Int) fail("expected an integer exponent");
            base = base.pow(unsigned(peek().value));
            ++pos_;
        }
        if (is_punct('/')) {
            ++pos_;
            if (peek().kind != Token::Kind::Int || peek().value == 0)
                fail("expected a nonzero integer divisor");
            IndexPoly::Terms t;
            for (const auto& [e, c] : base.terms()) t.emplace(e, c / Rational(peek().value));
            ++pos_;
            base = IndexPoly(std::move(t));
        }
        return base;
    }

    Lexer lex_;
    size_t pos_ = 0;
};

} // namespace

// ---- Ast constructors ----

AstPtr Ast::integer(long long v) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::Integer;
    a->int_value = v;
    return a;
}

AstPtr Ast::monomial(Monomial m) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::Mono;
    a->mono = std::move(m);
    return a;
}

AstPtr Ast::theta(Monomial x, Monomial y) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::Theta;
    a->arg1 = std::move(x);
    a->arg2 = std::move(y);
    return a;
}

AstPtr Ast::call(Kind k, Monomial x, Monomial y) {
    auto a = std::make_shared<Ast>();
    a->kind = k;
    a->arg1 = std::move(x);
    a->arg2 = std::move(y);
    return a;
}

AstPtr Ast::lattice_sum(LatticeSum ls) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::LatSum;
    a->lattice = std::make_shared<const LatticeSum>(std::move(ls));
    return a;
}

AstPtr Ast::product(std::vector<AstPtr> fs) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::Product;
    a->factors = std::move(fs);
    return a;
}

AstPtr Ast::sum(std::vector<std::pair<int, AstPtr>> ts) {
    auto a = std::make_shared<Ast>();
    a->kind = Kind::Sum;
    a->terms = std::move(ts);
    return a;
}

bool ast_equal(const Ast& a, const Ast& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Ast::Kind::Integer:
            return a.int_value == b.int_value;
        case Ast::Kind::Mono:
            return a.mono == b.mono;
        case Ast::Kind::Theta:
        case Ast::Kind::Poch:
        case Ast::Kind::Jt:
            return a.arg1 == b.arg1 && a.arg2 == b.arg2;
        case Ast::Kind::Phi:
        case Ast::Kind::Psi:
        case Ast::Kind::Chi:
        case Ast::Kind::Fq:
            return a.arg1 == b.arg1;
        case Ast::Kind::LatSum: {
            // Structural comparison via the summand data.
            const auto& x = *a.lattice;
            const auto& y = *b.lattice;
            if (x.dim() != y.dim() || x.summands().size() != y.summands().size()) return false;
            for (size_t i = 0; i < x.summands().size(); ++i) {
                const auto& s = x.summands()[i];
                const auto& t = y.summands()[i];
                if (s.parity != t.parity || !(s.weight.terms() == t.weight.terms()) ||
                    !(s.qexp.terms() == t.qexp.terms()))
                    return false;
                if (s.vmaps.size() != t.vmaps.size()) return false;
                for (size_t j = 0; j < s.vmaps.size(); ++j)
                    if (s.vmaps[j].first != t.vmaps[j].first ||
                        !(s.vmaps[j].second.terms() == t.vmaps[j].second.terms()))
                        return false;
            }
            return true;
        }
        case Ast::Kind::Product:
            if (a.factors.size() != b.factors.size()) return false;
            for (size_t i = 0; i < a.factors.size(); ++i)
                if (!ast_equal(*a.factors[i], *b.factors[i])) return false;
            return true;
        case Ast::Kind::Sum:
            if (a.terms.size() != b.terms.size()) return false;
            for (size_t i = 0; i < a.terms.size(); ++i)
                if (a.terms[i].first != b.terms[i].first ||
                    !ast_equal(*a.terms[i].second, *b.terms[i].second))
                    return false;
            return true;
    }
    return false;
}

AstPtr parse_expr(const std::string& text) {
    Parser p(text);
    return p.parse_full_expr();
}

// ---- canonicalization and printing ----

namespace {

struct FlatTerm {
    int sign = 1;
    long long scalar = 1;
    Monomial mono = Monomial::one();
    std::vector<AstPtr> rest;
};

void flatten_product(const AstPtr& node, FlatTerm& out) {
    switch (node->kind) {
        case Ast::Kind::Integer: {
            long long v = node->int_value;
            if (v < 0) {
                out.sign = -out.sign;
                v = -v;
            }
            out.scalar *= v;
            return;
        }
        case Ast::Kind::Mono: {
            Monomial m = node->mono;
            if (m.sign() < 0) {
                out.sign = -out.sign;
                m = m.negated();
            }
            out.mono *= m;
            return;
        }
        case Ast::Kind::Product:
            for (const auto& f : node->factors) flatten_product(f, out);
            return;
        default:
            out.rest.push_back(node);
            return;
    }
}

void flatten_sum(const AstPtr& node, int sign, std::vector<std::pair<int, AstPtr>>& out);

AstPtr canonical_term(const FlatTerm& t) {
    std::vector<AstPtr> factors;
    if (t.scalar != 1 || (t.mono.is_one() && t.rest.empty()))
        factors.push_back(Ast::integer(t.scalar));
    if (!t.mono.is_one()) factors.push_back(Ast::monomial(t.mono));
    for (const auto& f : t.rest) {
        if (f->kind == Ast::Kind::Sum || f->kind == Ast::Kind::Product)
            factors.push_back(canonical(f));
        else
            factors.push_back(f);
    }
    if (factors.size() == 1) return factors[0];
    return Ast::product(std::move(factors));
}

void flatten_sum(const AstPtr& node, int sign, std::vector<std::pair<int, AstPtr>>& out) {
    if (node->kind == Ast::Kind::Sum) {
        for (const auto& [s, child] : node->terms) flatten_sum(child, sign * s, out);
        return;
    }
    FlatTerm t;
    flatten_product(node, t);
    if (t.scalar == 0) return;
    out.emplace_back(sign * t.sign, canonical_term(t));
}

} // namespace

AstPtr canonical(const AstPtr& ast) {
    std::vector<std::pair<int, AstPtr>> terms;
    flatten_sum(ast, 1, terms);
    if (terms.empty()) return Ast::integer(0);
    if (terms.size() == 1 && terms[0].first == 1) return terms[0].second;
    return Ast::sum(std::move(terms));
}

namespace {

std::string print_poly(const IndexPoly& p, const std::vector<std::string>& names) {
    if (p.terms().empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        Rational coeff = c;
        bool neg = coeff < Rational(0);
        if (neg) coeff = -coeff;
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        std::string vars;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += names[i];
            if (e[i] > 1) vars += "^" + std::to_string(e[i]);
        }
        std::string num = std::to_string(coeff.num());
        bool unit = coeff.num() == 1 && coeff.den() == 1;
        if (vars.empty()) {
            out += num;
            if (coeff.den() != 1) out += "/" + std::to_string(coeff.den());
        } else if (coeff.den() != 1) {
            out += "(" + (unit ? "1" : num) + "/" + std::to_string(coeff.den()) + ")*" + vars;
        } else if (!unit) {
            out += num + "*" + vars;
        } else {
            out += vars;
        }
    }
    return out;
}

std::vector<std::string> latsum_index_names(int dim) {
    static const char* base[] = {"m", "n", "k", "r", "s"};
    std::vector<std::string> names;
    for (int i = 0; i < dim; ++i)
        names.push_back(i < 5 ? base[i] : "i" + std::to_string(i));
    return names;
}

std::string print_latsum(const LatticeSum& ls) {
    auto names = latsum_index_names(ls.dim());
    std::string out = "latsum(";
    for (int i = 0; i < ls.dim(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    out += ") {";
    bool first_summand = true;
    for (const auto& s : ls.summands()) {
        out += first_summand ? " " : " | ";
        first_summand = false;
        bool has_parity = std::any_of(s.parity.begin(), s.parity.end(), [](int p) { return p; });
        std::vector<std::string> fields;
        if (has_parity) {
            std::string lin;
            for (int i = 0; i < ls.dim(); ++i)
                if (s.parity[i]) {
                    if (!lin.empty()) lin += "+";
                    lin += names[i];
                }
            fields.push_back("sign " + lin);
        }
        fields.push_back("weight " + print_poly(s.weight, names));
        fields.push_back("qexp " + print_poly(s.qexp, names));
        for (const auto& [sym, p] : s.vmaps)
            fields.push_back("pow " + sym + " " + print_poly(p, names));
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out += "; ";
            out += fields[i];
        }
    }
    out += " }";
    return out;
}

std::string print_atom(const AstPtr& a) {
    switch (a->kind) {
        case Ast::Kind::Integer:
            return std::to_string(a->int_value);
        case Ast::Kind::Mono:
            return a->mono.str();
        case Ast::Kind::Theta:
            return "f(" + a->arg1.str() + ", " + a->arg2.str() + ")";
        case Ast::Kind::Phi:
            return "phi(" + a->arg1.str() + ")";
        case Ast::Kind::Psi:
            return "psi(" + a->arg1.str() + ")";
        case Ast::Kind::Chi:
            return "chi(" + a->arg1.str() + ")";
        case Ast::Kind::Fq:
            return "fq(" + a->arg1.str() + ")";
        case Ast::Kind::Poch:
            return "poch(" + a->arg1.str() + "; " + a->arg2.str() + ")";
        case Ast::Kind::Jt:
            return "jt(" + a->arg1.str() + "; " + a->arg2.str() + ")";
        case Ast::Kind::LatSum:
            return print_latsum(*a->lattice);
        case Ast::Kind::Product: {
            std::string out;
            for (size_t i = 0; i < a->factors.size(); ++i) {
                if (i) out += "*";
                const auto& f = a->factors[i];
                if (f->kind == Ast::Kind::Sum)
                    out += "(" + print_atom(f) + ")";
                else
                    out += print_atom(f);
            }
            return out;
        }
        case Ast::Kind::Sum: {
            std::string out;
            for (size_t i = 0; i < a->terms.size(); ++i) {
                const auto& [s, child] = a->terms[i];
                if (i == 0)
                    out += s < 0 ? "-" : "";
                else
                    out += s < 0 ? " - " : " + ";
                if (child->kind == Ast::Kind::Sum)
                    out += "(" + print_atom(child) + ")";
                else
                    out += print_atom(child);
            }
            return out;
        }
    }
    return "?";
}

} // namespace

std::string print(const AstPtr& ast) {
    return print_atom(canonical(ast));
}

// ---- evaluation ----

namespace {

Series evaluate_at(const Ast& a, const Rational& order);

Series evaluate_product(const Ast& a, const Rational& order) {
    Rational target = order;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Series acc = Series::one();
        for (const auto& f : a.factors) acc = acc * evaluate_at(*f, target);
        if (acc.covers(order)) return acc.truncated(order);
        // Negative minimal exponents among the factors ate into the
        // truncation threshold; re-evaluate with that much headroom.
        target += order - *acc.order();
    }
    throw std::logic_error("product evaluation failed to reach the requested order");
}

Series evaluate_at(const Ast& a, const Rational& order) {
    switch (a.kind) {
        case Ast::Kind::Integer:
            return Series::constant(a.int_value);
        case Ast::Kind::Mono:
            return Series::from_monomial(a.mono);
        case Ast::Kind::Theta:
            return expand_theta(ThetaFactor(a.arg1, a.arg2), order);
        case Ast::Kind::Phi:
            return expand_theta(theta_phi(a.arg1), order);
        case Ast::Kind::Psi:
            return expand_theta(theta_psi(a.arg1), order);
        case Ast::Kind::Chi:
            return expand_chi(a.arg1, order);
        case Ast::Kind::Fq:
            return expand_theta(theta_f_minus(a.arg1), order);
        case Ast::Kind::Poch:
            return pochhammer(a.arg1, a.arg2, order);
        case Ast::Kind::Jt:
            return jacobi_bracket(a.arg1, a.arg2, order);
        case Ast::Kind::LatSum:
            return expand_lattice_sum(*a.lattice, order);
        case Ast::Kind::Product:
            return evaluate_product(a, order);
        case Ast::Kind::Sum: {
            Series acc = Series::zero(order);
            for (const auto& [s, child] : a.terms) {
                Series v = evaluate_at(*child, order);
                acc = s < 0 ? acc - v : acc + v;
            }
            return acc;
        }
    }
    throw std::logic_error("unhandled ast node");
}

} // namespace

Series evaluate(const AstPtr& ast, const Rational& order) {
    Series s = evaluate_at(*ast, order);
    if (!s.covers(order)) throw std::logic_error("evaluation fell short of requested order");
    return s;
}

// ---- theta-combo lowering ----

ThetaCombo lower_theta_combo(const AstPtr& ast) {
    AstPtr c = canonical(ast);
    std::vector<std::pair<int, AstPtr>> terms;
    if (c->kind == Ast::Kind::Sum)
        terms = c->terms;
    else
        terms.emplace_back(1, c);

    ThetaCombo combo;
    for (const auto& [sign, node] : terms) {
        ComboTerm term;
        term.scalar = sign;
        std::vector<AstPtr> factors =
            node->kind == Ast::Kind::Product ? node->factors : std::vector<AstPtr>{node};
        for (const auto& f : factors) {
            switch (f->kind) {
                case Ast::Kind::Integer:
                    term.scalar *= f->int_value;
                    break;
                case Ast::Kind::Mono:
                    term.coeff *= f->mono;
                    break;
                case Ast::Kind::Theta:
                    term.factors.emplace_back(f->arg1, f->arg2);
                    break;
                case Ast::Kind::Phi:
                    term.factors.push_back(theta_phi(f->arg1));
                    break;
                case Ast::Kind::Psi:
                    term.factors.push_back(theta_psi(f->arg1));
                    break;
                case Ast::Kind::Fq:
                    term.factors.push_back(theta_f_minus(f->arg1));
                    break;
                default:
                    throw std::domain_error(
                        "expression is not a pure theta combination (found " +
                        print_atom(f) + ")");
            }
        }
        if (term.coeff.sign() < 0) {
            term.coeff = term.coeff.negated();
            term.scalar = -term.scalar;
        }
        if (term.scalar == 0) continue;
        combo.push(std::move(term));
    }
    // Lowering preserves term and argument order; canonicalize() is the
    // caller's choice when structural comparison is wanted.
    return combo;
}

AstPtr combo_to_ast(const ThetaCombo& combo) {
    if (combo.terms().empty()) return Ast::integer(0);
    std::vector<std::pair<int, AstPtr>> terms;
    for (const auto& t : combo.terms()) {
        std::vector<AstPtr> factors;
        long long scalar = t.scalar;
        int sign = 1;
        if (scalar < 0) {
            sign = -1;
            scalar = -scalar;
        }
        if (scalar != 1) factors.push_back(Ast::integer(scalar));
        if (!t.coeff.is_one()) factors.push_back(Ast::monomial(t.coeff));
        for (const auto& f : t.factors) factors.push_back(Ast::theta(f.first(), f.second()));
        AstPtr node = factors.size() == 1 ? factors[0] : Ast::product(std::move(factors));
        terms.emplace_back(sign, node);
    }
    if (terms.size() == 1 && terms[0].first == 1) return terms[0].second;
    return Ast::sum(std::move(terms));
}

std::string print_combo(const ThetaCombo& combo) {
    return print(combo_to_ast(combo));
}

} // namespace thetaforge
