#include "thetaforge/decompose.hpp"

#include <stdexcept>

namespace thetaforge {

namespace {

Rational half(long long v) {
    return Rational(v, 2);
}

std::vector<Rational> factor_weights(const std::vector<ThetaFactor>& factors) {
    std::vector<Rational> l;
    l.reserve(factors.size());
    for (const auto& f : factors) {
        if (!f.is_decomposable())
            throw std::domain_error("factor f(" + f.first().str() + ", " + f.second().str() +
                                    ") is not decomposable (needs ab = q^l)");
        l.push_back(f.weight());
    }
    return l;
}

void validate(const DecompositionInput& input) {
    int n = int(input.factors.size());
    if (input.b.n() != n)
        throw std::invalid_argument("matrix size does not match factor count");
    auto l = factor_weights(input.factors);
    auto orth = check_orthogonal(input.b, l);
    if (!orth.ok) {
        auto f = *orth.failure;
        throw std::domain_error("matrix is not generalized orthogonal for these weights: "
                                "off-diagonal (" + std::to_string(f.row + 1) + "," +
                                std::to_string(f.col + 1) + ") = " + f.value.str());
    }
    if (!(input.reps.b == input.b))
        throw std::invalid_argument("coset system belongs to a different matrix");
    long long k = det(input.b);
    if (k < 0) k = -k;
    if ((long long)input.reps.reps.size() != k)
        throw std::invalid_argument("coset system size does not match |det B|");
}

} // namespace

PreparedInput prepare_input(std::vector<ThetaFactor> factors, const IntMatrix& b,
                            ResidueWindow window, std::optional<int> column) {
    int n = int(factors.size());
    if (b.n() != n) throw std::invalid_argument("matrix size does not match factor count");
    auto l = factor_weights(factors);
    auto orth = check_orthogonal(b, l);
    if (!orth.ok) {
        auto f = *orth.failure;
        throw std::domain_error("matrix is not generalized orthogonal for these weights: "
                                "off-diagonal (" + std::to_string(f.row + 1) + "," +
                                std::to_string(f.col + 1) + ") = " + f.value.str());
    }

    PreparedInput out;
    out.input.factors = std::move(factors);
    out.input.b = b;
    int j_lo = column.value_or(0), j_hi = column.value_or(n - 1);
    for (int j = j_lo; j <= j_hi; ++j) {
        if (auto cs = theorem_reps(b, j)) {
            if (window == ResidueWindow::Centered) {
                auto k = (long long)cs->reps.size();
                // floor(-k/2)+1 .. floor(k/2), a complete residue system.
                long long lo = k % 2 == 0 ? -(k / 2) + 1 : -(k / 2);
                cs->reps.clear();
                for (long long r = lo; r <= k / 2; ++r) {
                    std::vector<long long> rep(n, 0);
                    rep[j] = r;
                    cs->reps.push_back(std::move(rep));
                }
            }
            out.input.reps = std::move(*cs);
            out.kind = RepsKind::Theorem;
            out.theorem_column = j;
            return out;
        }
    }
    if (column)
        throw std::domain_error("theorem representatives refused for column " +
                                std::to_string(*column + 1));
    out.input.reps = cosets(b);
    out.kind = RepsKind::General;
    return out;
}

namespace {

/// One term of the decomposition for coset representative t.
ComboTerm coset_term(const std::vector<ThetaFactor>& factors, const IntMatrix& b,
                     const std::vector<long long>& t) {
    int n = int(factors.size());
    ComboTerm term;
    term.coeff = Monomial::one();
    for (int i = 0; i < n; ++i) {
        term.coeff *= factors[i].first().pow(half(t[i] * t[i] + t[i]));
        term.coeff *= factors[i].second().pow(half(t[i] * t[i] - t[i]));
    }
    for (int c = 0; c < n; ++c) {
        Monomial first = Monomial::one(), second = Monomial::one();
        for (int i = 0; i < n; ++i) {
            long long bij = b.at(i, c);
            Rational plus = half(bij * bij + bij) + Rational(bij * t[i]);
            Rational minus = half(bij * bij - bij) + Rational(bij * t[i]);
            if (!plus.is_integer() || !minus.is_integer())
                throw std::logic_error("non-integer theta-argument exponent");
            first *= factors[i].first().pow(plus);
            first *= factors[i].second().pow(minus);
            second *= factors[i].first().pow(half(bij * bij - bij) - Rational(bij * t[i]));
            second *= factors[i].second().pow(half(bij * bij + bij) - Rational(bij * t[i]));
        }
        term.factors.emplace_back(std::move(first), std::move(second));
    }
    return term;
}

} // namespace

ThetaCombo decompose(const DecompositionInput& input) {
    validate(input);
    ThetaCombo combo;
    for (const auto& t : input.reps.reps)
        combo.push(coset_term(input.factors, input.b, t));
    combo.canonicalize();
    return combo;
}

ThetaCombo decompose_sum_diff(const DecompositionInput& input, CombineMode mode) {
    validate(input);
    int n = int(input.factors.size());
    for (int j = 0; j < n; ++j) {
        long long colsum = 0;
        for (int i = 0; i < n; ++i) colsum += input.b.at(i, j);
        if (colsum % 2 != 0)
            throw std::domain_error("column " + std::to_string(j + 1) +
                                    " of B has odd entry sum");
    }
    // With even column sums, (-1)^{sum x_i} is constant on each coset, equal
    // to the parity of the representative's coordinate sum; the sum/difference
    // keeps matching-parity cosets with doubled coefficients.
    int want = mode == CombineMode::Sum ? 0 : 1;
    ThetaCombo combo;
    for (const auto& t : input.reps.reps) {
        long long s = 0;
        for (long long x : t) s += x;
        if (((s % 2) + 2) % 2 != want) continue;
        ComboTerm term = coset_term(input.factors, input.b, t);
        term.scalar = 2;
        combo.push(std::move(term));
    }
    combo.canonicalize();
    return combo;
}

ThetaFactor schroter_T(const Monomial& x, const Rational& a) {
    Monomial qa = Monomial::q_power(a);
    return ThetaFactor(x * qa, qa * x.inverse());
}

namespace {

void require_positive(std::initializer_list<long long> vals, const char* what) {
    for (long long v : vals)
        if (v < 1) throw std::invalid_argument(std::string(what) + " parameters must be positive");
}

} // namespace

SchroterMatrix schroter_matrix(const SchroterPreset& preset) {
    SchroterMatrix out;
    if (auto* p = std::get_if<SchroterClassic>(&preset)) {
        require_positive({p->a, p->b}, "schroter");
        out.b = IntMatrix(2, {1, -p->b, 1, p->a});
        out.weights = {Rational(p->a), Rational(p->b)};
    } else if (auto* p = std::get_if<SchroterGeneralized>(&preset)) {
        require_positive({p->k1, p->k2, p->a, p->b}, "generalized schroter");
        out.b = IntMatrix(2, {1, -p->k1 * p->k2 * p->b, p->k1, p->k2 * p->a});
        out.weights = {Rational(p->a), Rational(p->b)};
    } else if (auto* p = std::get_if<SchroterGeneralizedDiv>(&preset)) {
        require_positive({p->k1, p->k2, p->a, p->b}, "generalized schroter");
        if ((p->k1 * p->b) % p->k2 != 0 || p->a % p->k2 != 0)
            throw std::invalid_argument("divided schroter preset needs k2 | k1*b and k2 | a");
        out.b = IntMatrix(2, {1, -(p->k1 * p->b) / p->k2, p->k1, p->a / p->k2});
        out.weights = {Rational(p->a), Rational(p->b)};
    } else if (auto* p = std::get_if<SchroterChuYan>(&preset)) {
        require_positive({p->alpha, p->beta, p->gamma}, "chu-yan");
        if (gcd_ll(p->alpha, p->gamma) != 1)
            throw std::invalid_argument("chu-yan preset needs gcd(alpha, gamma) = 1");
        out.b = IntMatrix(2, {p->beta * p->gamma, -1, 1, p->alpha * p->beta});
        out.weights = {Rational(p->alpha), Rational(p->gamma)};
    } else if (auto* p = std::get_if<SchroterBBG>(&preset)) {
        require_positive({p->alpha, p->beta, p->m}, "bbg");
        if (p->m <= p->alpha * p->beta)
            throw std::invalid_argument("bbg preset needs m > alpha*beta");
        out.b = IntMatrix(2, {1, -p->beta, p->alpha, p->m - p->alpha * p->beta});
        out.weights = {Rational(p->alpha * (p->m - p->alpha * p->beta)), Rational(p->beta)};
    } else if (auto* p = std::get_if<SchroterKongLiu1>(&preset)) {
        require_positive({p->k}, "kong-liu");
        out.b = IntMatrix(2, {1, -p->k, 1, 1});
        out.weights = {Rational(1), Rational(p->k)};
    } else if (auto* p = std::get_if<SchroterKongLiu2>(&preset)) {
        require_positive({p->k}, "kong-liu");
        out.b = IntMatrix(2, {1, -2 * p->k, 2, 1});
        out.weights = {Rational(1), Rational(p->k)};
    } else {
        throw std::logic_error("unhandled schroter preset");
    }
    auto orth = check_orthogonal(out.b, out.weights);
    if (!orth.ok) throw std::logic_error("schroter preset matrix not orthogonal");
    return out;
}

LatticeSum quadform_lattice_sum(const RationalMatrix& q) {
    int n = q.n();
    LatticeSummand s;
    s.parity.assign(n, 0);
    s.weight = IndexPoly::constant(n, Rational(1));
    IndexPoly qe;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            IndexPoly term = IndexPoly::variable(n, i) * IndexPoly::variable(n, j);
            IndexPoly::Terms scaled;
            for (const auto& [e, c] : term.terms()) scaled.emplace(e, c * q.at(i, j));
            qe += IndexPoly(std::move(scaled));
        }
    s.qexp = qe;
    return LatticeSum(n, {std::move(s)});
}

ThetaCombo quadform_decompose(const RationalMatrix& q, const IntMatrix& b) {
    int n = q.n();
    if (b.n() != n) throw std::invalid_argument("matrix size mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(q.at(i, j) == q.at(j, i)))
                throw std::invalid_argument("quadratic form must be symmetric");
    if (det(b) == 0) throw std::domain_error("singular coset matrix");

    // D' = B^T Q B must be diagonal.
    RationalMatrix d(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Rational acc(0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    acc += Rational(b.at(i, r)) * q.at(i, j) * Rational(b.at(j, c));
            d.at(r, c) = acc;
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (r != c && !d.at(r, c).is_zero())
                throw std::domain_error("B does not diagonalize the quadratic form");
    for (int r = 0; r < n; ++r)
        if (!(d.at(r, r) > Rational(0)))
            throw std::domain_error("quadratic form is not positive definite on B");

    CosetSystem cs = cosets(b);
    ThetaCombo combo;
    for (const auto& t : cs.reps) {
        // x = B y + t: exponent becomes sum_c D'_c y_c^2 + mu_c y_c + t^T Q t
        // with mu = 2 B^T Q t.
        ComboTerm term;
        Rational tqt(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                tqt += Rational(t[i]) * q.at(i, j) * Rational(t[j]);
        term.coeff = Monomial::q_power(tqt);
        for (int c = 0; c < n; ++c) {
            Rational mu(0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    mu += Rational(2) * Rational(b.at(i, c)) * q.at(i, j) * Rational(t[j]);
            // sum_y q^{L y^2 + mu y} = f(q^{L+mu}, q^{L-mu}).
            term.factors.emplace_back(Monomial::q_power(d.at(c, c) + mu),
                                      Monomial::q_power(d.at(c, c) - mu));
        }
        combo.push(std::move(term));
    }
    combo.canonicalize();
    return combo;
}

} // namespace thetaforge
