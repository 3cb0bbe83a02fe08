#pragma once

#include "thetaforge/series.hpp"

#include <vector>

namespace thetaforge {

/// Ramanujan theta factor f(a,b) = sum_n a^{n(n+1)/2} b^{n(n-1)/2}, with the
/// formal convergence requirement qexp(a) + qexp(b) > 0.
class ThetaFactor {
public:
    ThetaFactor(Monomial a, Monomial b);

    const Monomial& first() const { return a_; }
    const Monomial& second() const { return b_; }
    /// q-weight l with q^l = q-part of ab.
    Rational weight() const { return a_.qexp() + b_.qexp(); }

    /// True when ab = q^l exactly: signs multiply to +1 and symbol exponents
    /// cancel. Required of decomposition inputs.
    bool is_decomposable() const;

    /// Exact minimum q-exponent over the whole bilateral sum.
    Rational min_exponent() const;

    /// f(a,b) = f(b,a): the same factor with arguments in canonical order.
    ThetaFactor normalized() const;

    /// Swaps arguments and applies the shift f(a,b) = a^{n(n+1)/2} b^{n(n-1)/2}
    /// f(a(ab)^n, b(ab)^-n); returns the prefactor and the shifted factor.
    std::pair<Monomial, ThetaFactor> shifted(long long n) const;

    friend bool operator==(const ThetaFactor& x, const ThetaFactor& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator<(const ThetaFactor& x, const ThetaFactor& y) {
        if (!(x.a_ == y.a_)) return x.a_ < y.a_;
        return x.b_ < y.b_;
    }

private:
    Monomial a_, b_;
};

/// phi(m) = f(m, m), the sum of m^{n^2}.
ThetaFactor theta_phi(const Monomial& m);
/// psi(m) = f(m, m^3), the sum of m^{n(n+1)/2}.
ThetaFactor theta_psi(const Monomial& m);
/// f(-m) = f(-m, -m^2) = (m; m)_inf.
ThetaFactor theta_f_minus(const Monomial& m);

/// Bilateral expansion of f(a,b), exact for all q-exponents <= order. The
/// integer summation range is isolated exactly from the quadratic exponent.
Series expand_theta(const ThetaFactor& f, const Rational& order);

/// (x; base)_inf truncated at `order`; requires qexp(base) > 0.
Series pochhammer(const Monomial& x, const Monomial& base, const Rational& order);

/// chi(m) = (-m; m^2)_inf, expanded as a raw Pochhammer product.
Series expand_chi(const Monomial& m, const Rational& order);

/// Modified Jacobi theta <x; base> = (base;base)(x;base)(base/x;base).
Series jacobi_bracket(const Monomial& x, const Monomial& base, const Rational& order);

/// Jacobi-triple-product expansion f(a,b) = (-a;ab)(-b;ab)(ab;ab), shifting
/// via f(a,b) = a^{n(n+1)/2} b^{n(n-1)/2} f(a(ab)^n, b(ab)^-n) first when a
/// q-exponent is negative.
Series expand_product_form(const ThetaFactor& f, const Rational& order);

struct ComboTerm {
    long long scalar = 1;
    Monomial coeff;
    std::vector<ThetaFactor> factors;
};

/// A formal integer-linear combination of monomial-weighted theta products.
class ThetaCombo {
public:
    ThetaCombo() = default;
    explicit ThetaCombo(std::vector<ComboTerm> terms) : terms_(std::move(terms)) {}

    const std::vector<ComboTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    void push(ComboTerm t) { terms_.push_back(std::move(t)); }

    /// Sorts terms by coefficient (qexp, then symbol exponents) and factor
    /// lists; structural equality is equality after this.
    void canonicalize();

    friend bool operator==(const ThetaCombo& a, const ThetaCombo& b);

private:
    std::vector<ComboTerm> terms_;
};

/// Entry 31: f(a,b) as the k-term combination over the residues r mod k.
ThetaCombo dissect(const ThetaFactor& f, long long k);

Series expand_combo(const ThetaCombo& combo, const Rational& order);

/// Polynomial in the summation indices: exponent tuple -> coefficient.
class IndexPoly {
public:
    using Terms = std::map<std::vector<int>, Rational>;

    IndexPoly() = default;
    explicit IndexPoly(Terms terms);

    static IndexPoly constant(int dim, Rational c);
    static IndexPoly variable(int dim, int i);

    const Terms& terms() const { return terms_; }
    int dim() const;
    int degree() const;
    bool integer_coeffs() const;

    IndexPoly& operator+=(const IndexPoly& o);
    IndexPoly& operator-=(const IndexPoly& o);
    friend IndexPoly operator*(const IndexPoly& a, const IndexPoly& b);
    IndexPoly pow(unsigned e) const;
    IndexPoly negated() const;

    Rational eval(const std::vector<Rational>& x) const;
    Rational eval(const std::vector<long long>& x) const;

private:
    Terms terms_;
};

/// One summand of a general weighted lattice sum: over x in Z^dim,
/// (-1)^{<parity,x>} * weight(x) * q^{qexp(x)} * prod_s s^{vmap_s(x)}.
struct LatticeSummand {
    std::vector<int> parity;   // entries 0/1, length dim
    IndexPoly weight;          // integer coefficients, any degree
    IndexPoly qexp;            // quadratic, positive-definite quadratic part
    std::vector<std::pair<std::string, IndexPoly>> vmaps; // affine, integer
};

class LatticeSum {
public:
    LatticeSum(int dim, std::vector<LatticeSummand> summands);

    int dim() const { return dim_; }
    const std::vector<LatticeSummand>& summands() const { return summands_; }

private:
    int dim_;
    std::vector<LatticeSummand> summands_;
};

/// Enumerates every lattice point with qexp(x) <= order (ellipsoid bound from
/// the positive-definite quadratic part) and accumulates the terms.
Series expand_lattice_sum(const LatticeSum& ls, const Rational& order);

} // namespace thetaforge
