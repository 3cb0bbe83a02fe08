#include "thetaforge/theta.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace thetaforge {

namespace {

Rational half(long long num) {
    return Rational(num, 2);
}

/// Term q-exponent of f(a,b) at summation index n.
Rational theta_exponent(const Rational& qa, const Rational& qb, long long n) {
    return qa * half(n * n + n) + qb * half(n * n - n);
}

} // namespace

ThetaFactor::ThetaFactor(Monomial a, Monomial b) : a_(std::move(a)), b_(std::move(b)) {
    if (!(a_.qexp() + b_.qexp() > Rational(0)))
        throw std::domain_error("theta factor needs qexp(a)+qexp(b) > 0, got f(" +
                                a_.str() + ", " + b_.str() + ")");
}

ThetaFactor ThetaFactor::normalized() const {
    if (b_ < a_) return ThetaFactor(b_, a_);
    return *this;
}

bool ThetaFactor::is_decomposable() const {
    return a_.sign() * b_.sign() == 1 && (a_ * b_).vexp().empty();
}

Rational ThetaFactor::min_exponent() const {
    // The exponent (l/2) n^2 + ((qa-qb)/2) n is an upward parabola; the
    // integer minimum sits at floor or ceil of the real vertex.
    Rational qa = a_.qexp(), qb = b_.qexp();
    Rational vertex = -(qa - qb) / (Rational(2) * (qa + qb));
    return std::min(theta_exponent(qa, qb, vertex.floor()),
                    theta_exponent(qa, qb, vertex.ceil()));
}

std::pair<Monomial, ThetaFactor> ThetaFactor::shifted(long long n) const {
    Monomial ab = a_ * b_;
    Monomial pre = a_.pow(half(n * n + n)) * b_.pow(half(n * n - n));
    return {pre, ThetaFactor(a_ * ab.pow(Rational(n)), b_ * ab.pow(Rational(-n)))};
}

ThetaFactor theta_phi(const Monomial& m) {
    return ThetaFactor(m, m);
}

ThetaFactor theta_psi(const Monomial& m) {
    return ThetaFactor(m, m.pow(Rational(3)));
}

ThetaFactor theta_f_minus(const Monomial& m) {
    return ThetaFactor(m.negated(), m.pow(Rational(2)).negated());
}

Series expand_theta(const ThetaFactor& f, const Rational& order) {
    const Monomial& a = f.first();
    const Monomial& b = f.second();
    Rational qa = a.qexp(), qb = b.qexp();
    auto expo = [&](long long n) { return theta_exponent(qa, qb, n); };

    Rational vertex = -(qa - qb) / (Rational(2) * (qa + qb));
    Rational lo_min = std::min(expo(vertex.floor()), expo(vertex.ceil()));
    if (lo_min > order) return Series::from_terms({}, order, lo_min);

    long long anchor = expo(vertex.floor()) <= order ? vertex.floor() : vertex.ceil();
    // Largest n with exponent <= order: exponential probe, then binary search.
    auto last_below = [&](long long from, long long dir) {
        long long step = 1, lo = from, hi = from;
        while (expo(hi + dir * step) <= order) {
            hi += dir * step;
            step *= 2;
        }
        long long bad = hi + dir * step;
        while ((bad - hi) * dir > 1) {
            long long mid = hi + (bad - hi) / 2;
            (expo(mid) <= order ? hi : bad) = mid;
        }
        (void)lo;
        return hi;
    };
    long long nmax = last_below(anchor, +1);
    long long nmin = last_below(anchor, -1);

    Series::Terms terms;
    for (long long n = nmin; n <= nmax; ++n) {
        Rational e = expo(n);
        if (e > order) continue;
        Monomial t = a.pow(half(n * n + n)) * b.pow(half(n * n - n));
        TermKey k{t.qexp(), t.vexp()};
        auto [it, inserted] = terms.try_emplace(std::move(k), t.sign());
        if (!inserted) {
            it->second += t.sign();
            if (it->second == 0) terms.erase(it);
        }
    }
    return Series::from_terms(std::move(terms), order, lo_min);
}

Series pochhammer(const Monomial& x, const Monomial& base, const Rational& order) {
    if (!(base.qexp() > Rational(0)))
        throw std::domain_error("pochhammer base must have positive q-exponent");

    // Sum of the negative q-exponents over all factors 1 - x*base^k; the
    // whole infinite product has no exponent below this.
    Rational neg(0);
    for (Rational e = x.qexp(); e < Rational(0); e += base.qexp()) neg += e;

    Series acc = Series::one();
    Monomial xb = x;
    std::vector<std::pair<Monomial, Rational>> factors;
    for (Rational e = x.qexp(); e <= order - neg; e += base.qexp()) {
        factors.emplace_back(xb, std::min(e, Rational(0)));
        xb *= base;
    }
    // suffix[i]: negative q-exponent still to be multiplied in after factor i;
    // truncating intermediates to order - suffix keeps every retained
    // coefficient of the final product exact.
    std::vector<Rational> suffix(factors.size() + 1, Rational(0));
    for (size_t i = factors.size(); i-- > 0;) suffix[i] = suffix[i + 1] + factors[i].second;
    for (size_t i = 0; i < factors.size(); ++i) {
        acc = acc - acc.scaled(factors[i].first);
        acc = acc.truncated(order - suffix[i + 1]);
    }
    return Series::from_terms(Series::Terms(acc.terms()), order, std::min(neg, Rational(0)));
}

Series expand_chi(const Monomial& m, const Rational& order) {
    return pochhammer(m.negated(), m.pow(Rational(2)), order);
}

Series jacobi_bracket(const Monomial& x, const Monomial& base, const Rational& order) {
    Series p = pochhammer(base, base, order) * pochhammer(x, base, order);
    return (p * pochhammer(base * x.inverse(), base, order)).truncated(order);
}

Series expand_product_form(const ThetaFactor& f, const Rational& order) {
    Monomial a = f.first(), b = f.second();
    Rational l = f.weight();
    long long shift = 0;
    if (a.qexp() < Rational(0) || b.qexp() < Rational(0)) {
        // Unique n with qexp(a) + n*l in [0, l).
        shift = (-(a.qexp() / l)).ceil();
    }
    auto [pre, g] = f.shifted(shift);
    if (g.first().qexp() < Rational(0) || g.second().qexp() < Rational(0))
        throw std::domain_error("cannot shift theta factor into product range");
    Monomial ab = g.first() * g.second();
    Rational sub_order = order - pre.qexp();
    Series p = pochhammer(g.first().negated(), ab, sub_order) *
               pochhammer(g.second().negated(), ab, sub_order);
    p = p * pochhammer(ab, ab, sub_order);
    return p.scaled(pre).truncated(order);
}

void ThetaCombo::canonicalize() {
    // f(a,b) = f(b,a): normalize argument order, then sort factors and terms.
    for (auto& t : terms_) {
        for (auto& f : t.factors) f = f.normalized();
        std::sort(t.factors.begin(), t.factors.end());
    }
    std::sort(terms_.begin(), terms_.end(), [](const ComboTerm& x, const ComboTerm& y) {
        if (!(x.coeff == y.coeff)) return x.coeff < y.coeff;
        if (x.factors != y.factors)
            return std::lexicographical_compare(x.factors.begin(), x.factors.end(),
                                                y.factors.begin(), y.factors.end());
        return x.scalar < y.scalar;
    });
}

bool operator==(const ThetaCombo& a, const ThetaCombo& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i) {
        const auto& x = a.terms_[i];
        const auto& y = b.terms_[i];
        if (x.scalar != y.scalar || !(x.coeff == y.coeff) || x.factors != y.factors)
            return false;
    }
    return true;
}

ThetaCombo dissect(const ThetaFactor& f, long long k) {
    if (k < 1) throw std::invalid_argument("dissection needs k >= 1");
    const Monomial& a = f.first();
    const Monomial& b = f.second();
    ThetaCombo combo;
    for (long long r = 0; r < k; ++r) {
        ComboTerm t;
        t.coeff = a.pow(half(r * r + r)) * b.pow(half(r * r - r));
        t.factors.emplace_back(a.pow(half(k * k + k) + Rational(k * r)) *
                                   b.pow(half(k * k - k) + Rational(k * r)),
                               a.pow(half(k * k - k) - Rational(k * r)) *
                                   b.pow(half(k * k + k) - Rational(k * r)));
        combo.push(std::move(t));
    }
    combo.canonicalize();
    return combo;
}

Series expand_combo(const ThetaCombo& combo, const Rational& order) {
    Series total = Series::zero(order);
    for (const auto& term : combo.terms()) {
        Rational base = term.coeff.qexp();
        std::vector<Rational> mins;
        mins.reserve(term.factors.size());
        Rational all_min = base;
        for (const auto& f : term.factors) {
            mins.push_back(f.min_exponent());
            all_min += mins.back();
        }
        if (all_min > order) continue; // cannot reach the truncation window
        Series prod = Series::from_monomial(term.coeff, term.scalar);
        for (size_t i = 0; i < term.factors.size(); ++i) {
            Rational others = base;
            for (size_t j = 0; j < mins.size(); ++j)
                if (j != i) others += mins[j];
            prod = prod * expand_theta(term.factors[i], order - others);
        }
        total = total + prod;
    }
    return total.truncated(order);
}

// ---- lattice sums ----

IndexPoly::IndexPoly(Terms terms) : terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

IndexPoly IndexPoly::constant(int dim, Rational c) {
    Terms t;
    if (!c.is_zero()) t.emplace(std::vector<int>(dim, 0), c);
    return IndexPoly(std::move(t));
}

IndexPoly IndexPoly::variable(int dim, int i) {
    std::vector<int> e(dim, 0);
    e.at(i) = 1;
    Terms t;
    t.emplace(std::move(e), Rational(1));
    return IndexPoly(std::move(t));
}

int IndexPoly::dim() const {
    return terms_.empty() ? 0 : int(terms_.begin()->first.size());
}

int IndexPoly::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

bool IndexPoly::integer_coeffs() const {
    for (const auto& [e, c] : terms_)
        if (!c.is_integer()) return false;
    return true;
}

IndexPoly& IndexPoly::operator+=(const IndexPoly& o) {
    for (const auto& [e, c] : o.terms_) {
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    return *this;
}

IndexPoly& IndexPoly::operator-=(const IndexPoly& o) {
    return *this += o.negated();
}

IndexPoly IndexPoly::negated() const {
    Terms t;
    for (const auto& [e, c] : terms_) t.emplace(e, -c);
    return IndexPoly(std::move(t));
}

IndexPoly operator*(const IndexPoly& a, const IndexPoly& b) {
    IndexPoly::Terms t;
    for (const auto& [ea, ca] : a.terms()) {
        for (const auto& [eb, cb] : b.terms()) {
            std::vector<int> e = ea;
            for (size_t i = 0; i < e.size() && i < eb.size(); ++i) e[i] += eb[i];
            if (eb.size() > e.size()) e.insert(e.end(), eb.begin() + e.size(), eb.end());
            Rational c = ca * cb;
            auto [it, inserted] = t.try_emplace(std::move(e), c);
            if (!inserted) it->second += c;
        }
    }
    return IndexPoly(std::move(t));
}

IndexPoly IndexPoly::pow(unsigned e) const {
    IndexPoly acc = constant(dim(), Rational(1));
    for (unsigned i = 0; i < e; ++i) acc = acc * *this;
    return acc;
}

template <class Num>
static Rational eval_impl(const IndexPoly::Terms& terms, const std::vector<Num>& x) {
    Rational total(0);
    for (const auto& [e, c] : terms) {
        Rational v = c;
        for (size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) v *= Rational(x[i]);
        total += v;
    }
    return total;
}

Rational IndexPoly::eval(const std::vector<Rational>& x) const {
    return eval_impl(terms_, x);
}

Rational IndexPoly::eval(const std::vector<long long>& x) const {
    return eval_impl(terms_, x);
}

namespace {

/// Symmetric quadratic-part matrix of a degree-<=2 polynomial.
std::vector<std::vector<Rational>> quadratic_part(const IndexPoly& p, int dim) {
    std::vector<std::vector<Rational>> Q(dim, std::vector<Rational>(dim, Rational(0)));
    for (const auto& [e, c] : p.terms()) {
        int total = 0;
        for (int x : e) total += x;
        if (total != 2) continue;
        int i = -1, j = -1;
        for (int k = 0; k < int(e.size()); ++k) {
            if (e[k] == 2) i = j = k;
            if (e[k] == 1) (i < 0 ? i : j) = k;
        }
        if (i == j) {
            Q[i][i] += c;
        } else {
            Q[i][j] += c / Rational(2);
            Q[j][i] += c / Rational(2);
        }
    }
    return Q;
}

bool positive_definite(std::vector<std::vector<Rational>> Q) {
    // Rational Cholesky-style elimination: all pivots must stay positive.
    int n = int(Q.size());
    for (int k = 0; k < n; ++k) {
        if (!(Q[k][k] > Rational(0))) return false;
        for (int i = k + 1; i < n; ++i) {
            Rational f = Q[i][k] / Q[k][k];
            for (int j = k; j < n; ++j) Q[i][j] -= f * Q[k][j];
        }
    }
    return true;
}

/// Solves Q y = rhs for symmetric positive-definite rational Q.
std::vector<Rational> solve_spd(std::vector<std::vector<Rational>> Q,
                                std::vector<Rational> rhs) {
    int n = int(Q.size());
    for (int k = 0; k < n; ++k) {
        for (int i = k + 1; i < n; ++i) {
            Rational f = Q[i][k] / Q[k][k];
            for (int j = k; j < n; ++j) Q[i][j] -= f * Q[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<Rational> y(n, Rational(0));
    for (int i = n - 1; i >= 0; --i) {
        Rational s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= Q[i][j] * y[j];
        y[i] = s / Q[i][i];
    }
    return y;
}

} // namespace

LatticeSum::LatticeSum(int dim, std::vector<LatticeSummand> summands)
    : dim_(dim), summands_(std::move(summands)) {
    if (dim_ < 1) throw std::invalid_argument("lattice sum needs dim >= 1");
    for (const auto& s : summands_) {
        if (int(s.parity.size()) != dim_)
            throw std::invalid_argument("parity vector length mismatch");
        for (int p : s.parity)
            if (p != 0 && p != 1) throw std::invalid_argument("parity entries must be 0/1");
        if (!s.weight.integer_coeffs())
            throw std::invalid_argument("lattice weight must have integer coefficients");
        if (s.qexp.degree() > 2)
            throw std::invalid_argument("lattice q-exponent must be quadratic");
        if (!positive_definite(quadratic_part(s.qexp, dim_)))
            throw std::domain_error("lattice q-exponent is not positive definite");
        for (const auto& [name, vm] : s.vmaps) {
            if (vm.degree() > 1)
                throw std::invalid_argument("vmap for " + name + " must be affine");
            if (!vm.integer_coeffs())
                throw std::invalid_argument("vmap for " + name + " must be integral");
        }
    }
}

Series expand_lattice_sum(const LatticeSum& ls, const Rational& order) {
    int dim = ls.dim();
    Series::Terms terms;
    Rational global_min(0);
    for (const auto& s : ls.summands()) {
        auto Q = quadratic_part(s.qexp, dim);
        std::vector<Rational> L(dim, Rational(0));
        for (const auto& [e, c] : s.qexp.terms()) {
            int total = 0, idx = -1;
            for (int k = 0; k < dim; ++k) {
                total += e[k];
                if (e[k] == 1) idx = k;
            }
            if (total == 1) L[idx] += c;
        }
        std::vector<Rational> h = solve_spd(Q, L);
        for (auto& v : h) v = -v / Rational(2);
        std::vector<Rational> hr(h.begin(), h.end());
        Rational v0 = s.qexp.eval(hr);
        global_min = std::min(global_min, v0);
        if (v0 > order) continue;
        Rational radius = order - v0;

        // Per-coordinate bound: (x_i - h_i)^2 <= radius * (Q^-1)_ii.
        std::vector<long long> lo(dim), hi(dim);
        bool empty = false;
        for (int i = 0; i < dim; ++i) {
            std::vector<Rational> ei(dim, Rational(0));
            ei[i] = Rational(1);
            Rational inv_ii = solve_spd(Q, ei)[i];
            Rational bound = radius * inv_ii;
            auto inside = [&](long long t) {
                Rational d = Rational(t) - h[i];
                return d * d <= bound;
            };
            long long c = h[i].floor();
            long long anchor = 0;
            if (inside(c)) anchor = c;
            else if (inside(c + 1)) anchor = c + 1;
            else {
                empty = true;
                break;
            }
            long long t = anchor;
            while (inside(t - 1)) --t;
            lo[i] = t;
            t = anchor;
            while (inside(t + 1)) ++t;
            hi[i] = t;
        }
        if (empty) continue;

        std::vector<long long> x(dim);
        std::function<void(int)> walk = [&](int i) {
            if (i == dim) {
                Rational qe = s.qexp.eval(x);
                if (qe > order) return;
                Rational w = s.weight.eval(x);
                if (w.is_zero()) return;
                if (!w.is_integer())
                    throw std::logic_error("lattice weight evaluated non-integer");
                long long par = 0;
                for (int k = 0; k < dim; ++k) par += s.parity[k] * x[k];
                Int c = Int(w.num());
                if (par % 2 != 0) c = -c;
                TermKey key;
                key.qexp = qe;
                Monomial vm = Monomial::one();
                for (const auto& [name, poly] : s.vmaps) {
                    Rational e = poly.eval(x);
                    if (!e.is_zero()) vm *= Monomial::symbol(name, e);
                }
                key.vexp = vm.vexp();
                auto [it, inserted] = terms.try_emplace(std::move(key), c);
                if (!inserted) {
                    it->second += c;
                    if (it->second == 0) terms.erase(it);
                }
                return;
            }
            for (x[i] = lo[i]; x[i] <= hi[i]; ++x[i]) walk(i + 1);
        };
        walk(0);
    }
    return Series::from_terms(std::move(terms), order, global_min);
}

} // namespace thetaforge
