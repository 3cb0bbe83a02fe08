#include "thetaforge/series.hpp"

#include <algorithm>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace thetaforge {

std::string TermKey::str() const {
    Monomial m = Monomial::q_power(qexp);
    for (const auto& [s, e] : vexp) m *= Monomial::symbol(s, e);
    return m.str();
}

Series Series::zero(std::optional<Rational> order) {
    Series s;
    s.order_ = order;
    return s;
}

Series Series::one() {
    return constant(1);
}

Series Series::constant(Int c) {
    Series s;
    if (c != 0) s.terms_.emplace(TermKey{}, std::move(c));
    return s;
}

Series Series::from_monomial(const Monomial& m, Int scale) {
    Series s;
    if (m.sign() < 0) scale = -scale;
    if (scale == 0) return s;
    s.terms_.emplace(TermKey{m.qexp(), m.vexp()}, std::move(scale));
    s.minexp_ = m.qexp();
    return s;
}

Series Series::from_terms(Terms terms, std::optional<Rational> order,
                          std::optional<Rational> minexp) {
    Series s;
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->second == 0 || (order && it->first.qexp > *order))
            it = terms.erase(it);
        else
            ++it;
    }
    s.terms_ = std::move(terms);
    s.order_ = order;
    if (minexp) {
        s.minexp_ = *minexp;
        if (!s.terms_.empty() && s.terms_.begin()->first.qexp < s.minexp_)
            throw std::logic_error("series minexp bound violated");
    } else {
        s.minexp_ = s.terms_.empty() ? Rational(0)
                                     : std::min(Rational(0), s.terms_.begin()->first.qexp);
    }
    return s;
}

Series Series::truncated(const Rational& new_order) const {
    Series s;
    s.order_ = order_ ? std::min(*order_, new_order) : new_order;
    s.minexp_ = minexp_;
    for (const auto& [k, c] : terms_) {
        if (k.qexp > new_order) break;
        s.terms_.emplace_hint(s.terms_.end(), k, c);
    }
    return s;
}

namespace {

std::optional<Rational> min_order(const std::optional<Rational>& a,
                                  const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

} // namespace

Series operator+(const Series& a, const Series& b) {
    Series s;
    s.order_ = min_order(a.order_, b.order_);
    s.minexp_ = std::min(a.minexp_, b.minexp_);
    s.terms_ = a.terms_;
    for (const auto& [k, c] : b.terms_) {
        auto [it, inserted] = s.terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) s.terms_.erase(it);
        }
    }
    if (s.order_) {
        auto it = s.terms_.upper_bound(TermKey{*s.order_, Exponents{}});
        // upper_bound with empty vexp lands before terms of equal qexp; walk on.
        while (it != s.terms_.end() && !(it->first.qexp > *s.order_)) ++it;
        s.terms_.erase(it, s.terms_.end());
    }
    return s;
}

Series operator-(const Series& a, const Series& b) {
    return a + (-b);
}

Series Series::operator-() const {
    Series s;
    s.order_ = order_;
    s.minexp_ = minexp_;
    for (const auto& [k, c] : terms_) s.terms_.emplace_hint(s.terms_.end(), k, -c);
    return s;
}

namespace {

struct TermKeyHash {
    size_t operator()(const TermKey& k) const {
        size_t h = std::hash<long long>()(k.qexp.num()) * 1000003u ^
                   std::hash<long long>()(k.qexp.den());
        for (const auto& [s, e] : k.vexp) {
            h = h * 1000003u ^ std::hash<std::string_view>()(s);
            h = h * 1000003u ^ std::hash<long long>()(e.num());
            h = h * 1000003u ^ std::hash<long long>()(e.den());
        }
        return h;
    }
};

} // namespace

Series operator*(const Series& a, const Series& b) {
    Series s;
    // Reconciled order: every retained coefficient of the product is a finite
    // convolution, complete because the partner's tail sits above order-minexp.
    std::optional<Rational> oa = a.order_ ? std::optional(*a.order_ + b.minexp_) : std::nullopt;
    std::optional<Rational> ob = b.order_ ? std::optional(*b.order_ + a.minexp_) : std::nullopt;
    s.order_ = min_order(oa, ob);
    s.minexp_ = a.minexp_ + b.minexp_;
    const Series& outer = a.size() <= b.size() ? a : b;
    const Series& inner = a.size() <= b.size() ? b : a;

    // Accumulate through a hash map with a reused scratch key: in the dense
    // phase almost every pair lands on an existing key, so no allocation.
    std::unordered_map<TermKey, Int, TermKeyHash> acc;
    acc.reserve(inner.size() + outer.size() * 4);
    TermKey scratch;
    for (const auto& [ka, ca] : outer.terms_) {
        for (const auto& [kb, cb] : inner.terms_) {
            Rational qe = ka.qexp + kb.qexp;
            if (s.order_ && qe > *s.order_) break; // inner map is qexp-sorted
            scratch.qexp = qe;
            scratch.vexp.clear();
            size_t i = 0, j = 0;
            while (i < ka.vexp.size() || j < kb.vexp.size()) {
                if (j == kb.vexp.size() ||
                    (i < ka.vexp.size() && ka.vexp[i].first < kb.vexp[j].first)) {
                    scratch.vexp.push_back(ka.vexp[i++]);
                } else if (i == ka.vexp.size() || kb.vexp[j].first < ka.vexp[i].first) {
                    scratch.vexp.push_back(kb.vexp[j++]);
                } else {
                    Rational e = ka.vexp[i].second + kb.vexp[j].second;
                    if (!e.is_zero()) scratch.vexp.emplace_back(ka.vexp[i].first, e);
                    ++i;
                    ++j;
                }
            }
            if (auto it = acc.find(scratch); it != acc.end())
                it->second += ca * cb;
            else
                acc.emplace(scratch, ca * cb);
        }
    }
    for (auto& [k, c] : acc)
        if (c != 0) s.terms_.emplace(k, std::move(c));
    return s;
}

Series Series::scaled(const Int& c) const {
    if (c == 0) return zero(order_);
    Series s;
    s.order_ = order_;
    s.minexp_ = minexp_;
    for (const auto& [k, v] : terms_) s.terms_.emplace_hint(s.terms_.end(), k, v * c);
    return s;
}

Series Series::pow(unsigned long long e) const {
    Series acc = one();
    Series base = *this;
    while (e) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return acc;
}

Series Series::differentiated(const std::string& var) const {
    Series s;
    s.order_ = order_;
    s.minexp_ = minexp_;
    for (const auto& [k, c] : terms_) {
        Rational e;
        for (const auto& [name, x] : k.vexp)
            if (name == var) {
                e = x;
                break;
            }
        if (e.is_zero()) continue;
        if (!e.is_integer())
            throw std::domain_error("euler derivative needs integer exponents in " + var);
        s.terms_.emplace_hint(s.terms_.end(), k, c * e.num());
    }
    return s;
}

Series Series::substituted_one(const std::string& var) const {
    Series s;
    s.order_ = order_;
    s.minexp_ = minexp_;
    for (const auto& [k, c] : terms_) {
        TermKey nk;
        nk.qexp = k.qexp;
        for (const auto& [name, x] : k.vexp)
            if (name != var) nk.vexp.emplace_back(name, x);
        auto [it, inserted] = s.terms_.try_emplace(std::move(nk), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) s.terms_.erase(it);
        }
    }
    return s;
}

Int Series::coeff(const TermKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Int(0) : it->second;
}

std::string Series::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) out += c < 0 ? " - " : " + ";
        else if (c < 0) out += "-";
        first = false;
        Int a = abs(c);
        std::string key = k.str();
        if (a != 1 || key == "1") {
            out += a.str();
            if (key != "1") out += "*";
        }
        if (key != "1") out += key;
    }
    return out;
}

std::optional<Mismatch> first_mismatch(const Series& a, const Series& b,
                                       const Rational& at_least) {
    if (!a.covers(at_least) || !b.covers(at_least))
        throw std::invalid_argument("series not computed to the comparison order");
    Rational bound = at_least;
    auto ai = a.terms().begin(), ae = a.terms().end();
    auto bi = b.terms().begin(), be = b.terms().end();
    while (ai != ae || bi != be) {
        bool a_done = ai == ae || ai->first.qexp > bound;
        bool b_done = bi == be || bi->first.qexp > bound;
        if (a_done && b_done) break;
        if (b_done || (!a_done && ai->first < bi->first))
            return Mismatch{ai->first, ai->second, 0};
        if (a_done || bi->first < ai->first)
            return Mismatch{bi->first, 0, bi->second};
        if (ai->second != bi->second)
            return Mismatch{ai->first, ai->second, bi->second};
        ++ai;
        ++bi;
    }
    return std::nullopt;
}

} // namespace thetaforge
