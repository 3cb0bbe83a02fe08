#pragma once

#include "thetaforge/monomial.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>

namespace thetaforge {

using Int = boost::multiprecision::cpp_int;

/// Key of one series term: exact q-exponent plus symbol exponents.
struct TermKey {
    Rational qexp;
    Exponents vexp;

    friend bool operator==(const TermKey& a, const TermKey& b) {
        return a.qexp == b.qexp && a.vexp == b.vexp;
    }
    friend bool operator<(const TermKey& a, const TermKey& b) {
        if (auto c = a.qexp <=> b.qexp; c != 0) return c < 0;
        return compare_exponents(a.vexp, b.vexp) < 0;
    }
    std::string str() const;
};

/// Truncated formal Laurent series in q over symbolic variables, with
/// arbitrary-precision integer coefficients.
///
/// `order` is the truncation threshold: coefficients are exact for every
/// q-exponent <= order, and no term above it is stored. A series without an
/// order (std::nullopt) is an exact polynomial. `minexp` is a lower bound on
/// the q-exponent of every term of the *untruncated* object, including terms
/// beyond the threshold; multiplication uses it to reconcile orders so that
/// no retained coefficient is ever missing a cross term.
class Series {
public:
    using Terms = std::map<TermKey, Int>;

    Series() = default;

    static Series zero(std::optional<Rational> order = std::nullopt);
    static Series one();
    static Series from_monomial(const Monomial& m, Int scale = 1);
    static Series constant(Int c);
    /// Takes ownership of a term map; drops zero coefficients and terms above
    /// `order`; minexp defaults to the smallest stored exponent (clamped to 0
    /// for an empty map).
    static Series from_terms(Terms terms, std::optional<Rational> order,
                             std::optional<Rational> minexp = std::nullopt);

    const Terms& terms() const { return terms_; }
    const std::optional<Rational>& order() const { return order_; }
    const Rational& minexp() const { return minexp_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    /// True if the truncation threshold is at least `o` (exact series pass).
    bool covers(const Rational& o) const { return !order_ || *order_ >= o; }

    Series truncated(const Rational& new_order) const;

    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);
    Series operator-() const;

    Series scaled(const Monomial& m) const { return *this * from_monomial(m); }
    Series scaled(const Int& c) const;
    /// Truncation-aware integer power (repeated squaring).
    Series pow(unsigned long long e) const;

    /// Euler operator var * d/dvar: multiplies each coefficient by the term's
    /// var-exponent. Requires integer var-exponents (coefficients stay in Z).
    Series differentiated(const std::string& var) const;
    /// Sets var to 1: erases it from every key and merges collisions.
    Series substituted_one(const std::string& var) const;

    Int coeff(const TermKey& k) const;
    /// Structural equality of the term maps (metadata ignored).
    bool same_terms(const Series& o) const { return terms_ == o.terms_; }

    std::string str() const;

private:
    Terms terms_;
    std::optional<Rational> order_;
    Rational minexp_;
};

struct Mismatch {
    TermKey key;
    Int lhs;
    Int rhs;
};

/// Compares both series exactly up to min(order_a, order_b) (which must cover
/// `at_least`, else throws). Returns the first differing term, if any.
std::optional<Mismatch> first_mismatch(const Series& a, const Series& b,
                                       const Rational& at_least);

} // namespace thetaforge
