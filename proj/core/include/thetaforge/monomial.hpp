#pragma once

#include "thetaforge/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace thetaforge {

/// Symbol exponents, sorted by symbol name, with no zero entries.
using Exponents = std::vector<std::pair<std::string, Rational>>;

int compare_exponents(const Exponents& a, const Exponents& b);

/// A signed monomial sgn * q^qexp * prod_s s^{vexp[s]} with exact rational
/// exponents. This is the atom of every theta argument and coefficient.
class Monomial {
public:
    Monomial() = default;

    static Monomial one() { return Monomial(); }
    static Monomial q_power(Rational e);
    static Monomial symbol(const std::string& name, Rational e = Rational(1));
    static Monomial integer_sign(int sgn);

    int sign() const { return sign_; }
    const Rational& qexp() const { return qexp_; }
    const Exponents& vexp() const { return vexp_; }
    bool is_one() const { return sign_ == 1 && qexp_.is_zero() && vexp_.empty(); }
    /// True when the monomial is sgn * q^l with no symbols.
    bool is_pure_q() const { return vexp_.empty(); }

    Monomial& operator*=(const Monomial& o);
    friend Monomial operator*(Monomial a, const Monomial& b) { return a *= b; }

    /// Raises to an exact rational power. A negative sign requires an integer
    /// exponent; otherwise throws std::domain_error.
    Monomial pow(const Rational& e) const;
    Monomial inverse() const { return pow(Rational(-1)); }
    Monomial negated() const;

    Rational exponent_of(const std::string& name) const;

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.sign_ == b.sign_ && a.qexp_ == b.qexp_ && a.vexp_ == b.vexp_;
    }
    /// Canonical order: qexp, then vexp lexicographically, then sign.
    friend bool operator<(const Monomial& a, const Monomial& b);

    std::string str() const;

private:
    int sign_ = 1;
    Rational qexp_;
    Exponents vexp_;
};

} // namespace thetaforge
