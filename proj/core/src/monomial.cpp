#include "thetaforge/monomial.hpp"

#include <stdexcept>

namespace thetaforge {

int compare_exponents(const Exponents& a, const Exponents& b) {
    size_t i = 0;
    for (; i < a.size() && i < b.size(); ++i) {
        if (a[i].first != b[i].first) return a[i].first < b[i].first ? -1 : 1;
        auto c = a[i].second <=> b[i].second;
        if (c != 0) return c < 0 ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

Monomial Monomial::q_power(Rational e) {
    Monomial m;
    m.qexp_ = e;
    return m;
}

Monomial Monomial::symbol(const std::string& name, Rational e) {
    if (name.empty() || name == "q") throw std::invalid_argument("bad symbol name");
    Monomial m;
    if (!e.is_zero()) m.vexp_.emplace_back(name, e);
    return m;
}

Monomial Monomial::integer_sign(int sgn) {
    if (sgn != 1 && sgn != -1) throw std::invalid_argument("sign must be +-1");
    Monomial m;
    m.sign_ = sgn;
    return m;
}

Monomial& Monomial::operator*=(const Monomial& o) {
    sign_ *= o.sign_;
    qexp_ += o.qexp_;
    Exponents merged;
    merged.reserve(vexp_.size() + o.vexp_.size());
    size_t i = 0, j = 0;
    while (i < vexp_.size() || j < o.vexp_.size()) {
        if (j == o.vexp_.size() || (i < vexp_.size() && vexp_[i].first < o.vexp_[j].first)) {
            merged.push_back(vexp_[i++]);
        } else if (i == vexp_.size() || o.vexp_[j].first < vexp_[i].first) {
            merged.push_back(o.vexp_[j++]);
        } else {
            Rational e = vexp_[i].second + o.vexp_[j].second;
            if (!e.is_zero()) merged.emplace_back(vexp_[i].first, e);
            ++i;
            ++j;
        }
    }
    vexp_ = std::move(merged);
    return *this;
}

Monomial Monomial::pow(const Rational& e) const {
    Monomial m;
    if (sign_ == -1) {
        if (!e.is_integer())
            throw std::domain_error("fractional power of a negative monomial");
        m.sign_ = (e.num() % 2 == 0) ? 1 : -1;
    }
    if (e.is_zero()) return m;
    m.qexp_ = qexp_ * e;
    m.vexp_.reserve(vexp_.size());
    for (const auto& [s, x] : vexp_) m.vexp_.emplace_back(s, x * e);
    return m;
}

Monomial Monomial::negated() const {
    Monomial m = *this;
    m.sign_ = -m.sign_;
    return m;
}

Rational Monomial::exponent_of(const std::string& name) const {
    for (const auto& [s, x] : vexp_)
        if (s == name) return x;
    return Rational(0);
}

bool operator<(const Monomial& a, const Monomial& b) {
    if (auto c = a.qexp_ <=> b.qexp_; c != 0) return c < 0;
    if (int c = compare_exponents(a.vexp_, b.vexp_); c != 0) return c < 0;
    return a.sign_ < b.sign_;
}

std::string Monomial::str() const {
    std::string s;
    if (sign_ < 0) s += '-';
    bool first = true;
    auto emit = [&](const std::string& base, const Rational& e) {
        if (!first) s += '*';
        first = false;
        s += base;
        if (!(e == Rational(1))) {
            s += '^';
            s += e.str();
        }
    };
    if (!qexp_.is_zero()) emit("q", qexp_);
    for (const auto& [name, e] : vexp_) emit(name, e);
    if (first) s += '1';
    return s;
}

} // namespace thetaforge
