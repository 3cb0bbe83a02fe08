#include "thetaforge/rational.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace thetaforge {

long long gcd_ll(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

namespace {

long long narrow(__int128 v) {
    if (v > __int128(INT64_MAX) || v < __int128(INT64_MIN))
        throw std::overflow_error("rational arithmetic overflow");
    return (long long)v;
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

Rational::Rational(long long n, long long d) : num_(n), den_(d) {
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    long long g = gcd_ll(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::parse(std::string_view text) {
    auto parse_ll = [](std::string_view s) {
        long long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw std::invalid_argument("bad rational literal: '" + std::string(s) + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_ll(text));
    return Rational(parse_ll(text.substr(0, slash)), parse_ll(text.substr(slash + 1)));
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = narrow(-__int128(num_));
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) { // integer fast path
        num_ = narrow(__int128(num_) + o.num_);
        return *this;
    }
    __int128 n = __int128(num_) * o.den_ + __int128(o.num_) * den_;
    __int128 d = __int128(den_) * o.den_;
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = narrow(n);
    den_ = narrow(d);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    return *this += -o;
}

Rational& Rational::operator*=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) { // integer fast path
        num_ = narrow(__int128(num_) * o.num_);
        return *this;
    }
    __int128 n = __int128(num_) * o.num_;
    __int128 d = __int128(den_) * o.den_;
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = narrow(n);
    den_ = narrow(d);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    Rational inv;
    inv.num_ = o.num_ < 0 ? -o.den_ : o.den_;
    inv.den_ = o.num_ < 0 ? -o.num_ : o.num_;
    return *this *= inv;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) return a.num_ <=> b.num_;
    __int128 lhs = __int128(a.num_) * b.den_;
    __int128 rhs = __int128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

long long Rational::floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

long long Rational::ceil() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

std::string Rational::str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
        s += '/';
        s += std::to_string(den_);
    }
    return s;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

} // namespace thetaforge
