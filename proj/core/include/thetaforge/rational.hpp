#pragma once

#include <cstdint>
#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace thetaforge {

/// Exact rational over 64-bit integers, always stored in lowest terms with a
/// positive denominator. Arithmetic goes through 128-bit intermediates and
/// throws std::overflow_error if a reduced result leaves the 64-bit range;
/// exponent arithmetic in this engine stays far below that.
class Rational {
public:
    constexpr Rational() = default;
    Rational(long long n) : num_(n) {}
    Rational(long long n, long long d);

    /// Parses "p", "-p", or "p/q". Throws std::invalid_argument on bad input.
    static Rational parse(std::string_view text);

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ < 0 ? -1 : num_ > 0 ? 1 : 0; }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    /// Largest integer <= this.
    long long floor() const;
    long long ceil() const;

    double to_double() const { return double(num_) / double(den_); }
    std::string str() const;

private:
    long long num_ = 0;
    long long den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

long long gcd_ll(long long a, long long b);

} // namespace thetaforge
