#include "thetaforge/lattice.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace thetaforge {

using Int = boost::multiprecision::cpp_int;

IntMatrix::IntMatrix(int n, std::vector<long long> entries) : n_(n), e_(std::move(entries)) {
    if (e_.size() != size_t(n) * n) throw std::invalid_argument("matrix entry count mismatch");
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::parse(const std::string& text) {
    std::vector<std::vector<long long>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<long long> r;
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            size_t pos = 0;
            long long v = std::stoll(cell, &pos);
            while (pos < cell.size() && isspace((unsigned char)cell[pos])) ++pos;
            if (pos != cell.size()) throw std::invalid_argument("bad matrix entry: " + cell);
            r.push_back(v);
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::invalid_argument("empty matrix");
    int n = int(rows.size());
    std::vector<long long> flat;
    for (auto& r : rows) {
        if (int(r.size()) != n) throw std::invalid_argument("matrix must be square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return IntMatrix(n, std::move(flat));
}

std::vector<long long> IntMatrix::column(int j) const {
    std::vector<long long> c(n_);
    for (int i = 0; i < n_; ++i) c[i] = at(i, j);
    return c;
}

std::vector<long long> IntMatrix::apply(const std::vector<long long>& x) const {
    std::vector<long long> y(n_, 0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) y[i] += at(i, j) * x[j];
    return y;
}

std::string IntMatrix::str() const {
    std::string s;
    for (int i = 0; i < n_; ++i) {
        if (i) s += "; ";
        for (int j = 0; j < n_; ++j) {
            if (j) s += ",";
            s += std::to_string(at(i, j));
        }
    }
    return s;
}

namespace {

Int det_big(const std::vector<Int>& entries, int n) {
    if (n == 0) return 1;
    // Fraction-free Bareiss elimination.
    std::vector<Int> a = entries;
    auto at = [&](int i, int j) -> Int& { return a[size_t(i) * n + j]; };
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (at(i, k) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                at(i, j) = (at(k, k) * at(i, j) - at(i, k) * at(k, j)) / prev;
            at(i, k) = 0;
        }
        prev = at(k, k);
    }
    return sign * at(n - 1, n - 1);
}

Int det_big(const IntMatrix& m) {
    std::vector<Int> a(m.entries().begin(), m.entries().end());
    return det_big(a, m.n());
}

long long narrow_ll(const Int& v, const char* what) {
    if (v > Int(INT64_MAX) || v < Int(INT64_MIN))
        throw std::overflow_error(std::string("integer overflow in ") + what);
    return v.convert_to<long long>();
}

Int minor_det(const IntMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    int k = int(rows.size());
    std::vector<Int> sub(size_t(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub[size_t(i) * k + j] = m.at(rows[i], cols[j]);
    return det_big(sub, k);
}

void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

long long det(const IntMatrix& m) {
    return narrow_ll(det_big(m), "determinant");
}

IntMatrix adjugate(const IntMatrix& m) {
    int n = m.n();
    IntMatrix adj(n);
    if (n == 1) {
        adj.at(0, 0) = 1;
        return adj;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::vector<int> rows, cols;
            for (int r = 0; r < n; ++r)
                if (r != i) rows.push_back(r);
            for (int c = 0; c < n; ++c)
                if (c != j) cols.push_back(c);
            Int cof = minor_det(m, rows, cols);
            if ((i + j) % 2 != 0) cof = -cof;
            adj.at(j, i) = narrow_ll(cof, "adjugate");
        }
    }
    return adj;
}

std::vector<long long> determinantal_divisors(const IntMatrix& m) {
    int n = m.n();
    std::vector<long long> dk(size_t(n) + 1, 0);
    dk[0] = 1;
    for (int k = 1; k <= n; ++k) {
        Int g = 0;
        combinations(n, k, [&](const std::vector<int>& rows) {
            combinations(n, k, [&](const std::vector<int>& cols) {
                Int d = minor_det(m, rows, cols);
                g = gcd(g, d);
            });
        });
        dk[k] = narrow_ll(abs(g), "determinantal divisor");
    }
    return dk;
}

namespace {

struct SmithWork {
    int n;
    std::vector<Int> a, u, v;
    Int& A(int i, int j) { return a[size_t(i) * n + j]; }
    Int& U(int i, int j) { return u[size_t(i) * n + j]; }
    Int& V(int i, int j) { return v[size_t(i) * n + j]; }

    void row_swap(int r, int s) {
        for (int j = 0; j < n; ++j) {
            std::swap(A(r, j), A(s, j));
            std::swap(U(r, j), U(s, j));
        }
    }
    void col_swap(int c, int d) {
        for (int i = 0; i < n; ++i) {
            std::swap(A(i, c), A(i, d));
            std::swap(V(i, c), V(i, d));
        }
    }
    void row_addmul(int r, int s, const Int& f) { // row r += f * row s
        for (int j = 0; j < n; ++j) {
            A(r, j) += f * A(s, j);
            U(r, j) += f * U(s, j);
        }
    }
    void col_addmul(int c, int d, const Int& f) {
        for (int i = 0; i < n; ++i) {
            A(i, c) += f * A(i, d);
            V(i, c) += f * V(i, d);
        }
    }
    void row_negate(int r) {
        for (int j = 0; j < n; ++j) {
            A(r, j) = -A(r, j);
            U(r, j) = -U(r, j);
        }
    }
};

} // namespace

SmithData smith(const IntMatrix& b) {
    int n = b.n();
    if (det_big(b) == 0) throw std::domain_error("smith(): singular matrix");

    SmithWork w;
    w.n = n;
    w.a.assign(b.entries().begin(), b.entries().end());
    w.u.assign(size_t(n) * n, 0);
    w.v.assign(size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) w.U(i, i) = w.V(i, i) = 1;

    for (int k = 0; k < n; ++k) {
        while (true) {
            // Move the nonzero entry of least magnitude in the trailing block
            // to the pivot.
            int pi = -1, pj = -1;
            for (int i = k; i < n; ++i)
                for (int j = k; j < n; ++j)
                    if (w.A(i, j) != 0 &&
                        (pi < 0 || abs(w.A(i, j)) < abs(w.A(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) throw std::logic_error("smith(): rank deficiency");
            if (pi != k) w.row_swap(pi, k);
            if (pj != k) w.col_swap(pj, k);

            bool reduced = true;
            for (int i = k + 1; i < n; ++i)
                if (w.A(i, k) != 0) {
                    w.row_addmul(i, k, -(w.A(i, k) / w.A(k, k)));
                    if (w.A(i, k) != 0) reduced = false;
                }
            for (int j = k + 1; j < n; ++j)
                if (w.A(k, j) != 0) {
                    w.col_addmul(j, k, -(w.A(k, j) / w.A(k, k)));
                    if (w.A(k, j) != 0) reduced = false;
                }
            if (!reduced) continue;

            // Pivot must divide every remaining entry; if not, fold the
            // offending row into the pivot row and reduce again.
            bool divides = true;
            for (int i = k + 1; i < n && divides; ++i)
                for (int j = k + 1; j < n && divides; ++j)
                    if (w.A(i, j) % w.A(k, k) != 0) {
                        w.row_addmul(k, i, 1);
                        divides = false;
                    }
            if (divides) break;
        }
        if (w.A(k, k) < 0) w.row_negate(k);
    }

    SmithData out;
    out.U = IntMatrix(n);
    out.D = IntMatrix(n);
    out.V = IntMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.U.at(i, j) = narrow_ll(w.U(i, j), "smith U");
            out.D.at(i, j) = narrow_ll(w.A(i, j), "smith D");
            out.V.at(i, j) = narrow_ll(w.V(i, j), "smith V");
        }

    // Cross-check against minor-gcd divisors: s_k = d_k / d_{k-1}.
    out.dk = determinantal_divisors(b);
    out.sk.resize(n);
    for (int k = 1; k <= n; ++k) {
        if (out.dk[k] % out.dk[k - 1] != 0)
            throw std::logic_error("smith(): divisor chain broken");
        out.sk[k - 1] = out.dk[k] / out.dk[k - 1];
        if (out.sk[k - 1] != out.D.at(k - 1, k - 1))
            throw std::logic_error("smith(): diagonal disagrees with minor gcds");
        if (k > 1 && out.D.at(k - 1, k - 1) % out.D.at(k - 2, k - 2) != 0)
            throw std::logic_error("smith(): diagonal not a divisibility chain");
    }
    return out;
}

OrthogonalityCheck check_orthogonal(const IntMatrix& b, const std::vector<Rational>& weights) {
    int n = b.n();
    if (int(weights.size()) != n)
        throw std::invalid_argument("weight vector length mismatch");
    for (const auto& l : weights)
        if (!(l > Rational(0))) throw std::invalid_argument("weights must be positive");

    OrthogonalityCheck out;
    out.diagonal.resize(n, Rational(0));
    for (int r = 0; r < n; ++r) {
        for (int c = r; c < n; ++c) {
            Rational dot(0);
            for (int i = 0; i < n; ++i)
                dot += weights[i] * Rational(b.at(i, r) * b.at(i, c));
            if (r == c) {
                out.diagonal[r] = dot;
            } else if (!dot.is_zero() && !out.failure) {
                out.failure = OrthogonalityCheck::Failure{r, c, dot};
            }
        }
    }
    out.ok = !out.failure.has_value();
    return out;
}

namespace {

struct ExtGcd {
    Int g, s, t; // s*a + t*b = g
};

ExtGcd ext_gcd(Int a, Int b) {
    Int s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        Int qq = a / b;
        Int r = a - qq * b;
        a = b;
        b = r;
        Int s2 = s0 - qq * s1;
        s0 = s1;
        s1 = s2;
        Int t2 = t0 - qq * t1;
        t0 = t1;
        t1 = t2;
    }
    if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
    }
    return {a, s0, t0};
}

/// Lexicographically smallest nonnegative vector in t + (lattice spanned by
/// basis columns). Works coordinate by coordinate: the reachable values of
/// the leading coordinate form t_0 + gZ, and fixing it leaves a full-rank
/// sublattice on the remaining coordinates.
std::vector<Int> lex_min_nonneg(std::vector<std::vector<Int>> basis, std::vector<Int> t) {
    size_t n = t.size();
    if (n == 0) return {};

    Int g = 0;
    std::vector<Int> w(n, 0);
    for (const auto& v : basis) {
        if (v[0] == 0) continue;
        if (g == 0) {
            g = v[0];
            w = v;
            continue;
        }
        ExtGcd e = ext_gcd(g, v[0]);
        std::vector<Int> nw(n);
        for (size_t i = 0; i < n; ++i) nw[i] = e.s * w[i] + e.t * v[i];
        w = std::move(nw);
        g = e.g;
    }
    if (g == 0) throw std::logic_error("lattice not full rank");
    if (g < 0) {
        g = -g;
        for (auto& x : w) x = -x;
    }

    Int x0 = ((t[0] % g) + g) % g;
    Int k = (x0 - t[0]) / g;
    for (size_t i = 0; i < n; ++i) t[i] += k * w[i];

    std::vector<std::vector<Int>> sub;
    for (const auto& v : basis) {
        Int f = v[0] / g;
        std::vector<Int> r(n - 1);
        bool zero = true;
        for (size_t i = 1; i < n; ++i) {
            r[i - 1] = v[i] - f * w[i];
            if (r[i - 1] != 0) zero = false;
        }
        if (!zero) sub.push_back(std::move(r));
    }
    std::vector<Int> rest = lex_min_nonneg(std::move(sub), std::vector<Int>(t.begin() + 1, t.end()));
    std::vector<Int> out;
    out.reserve(n);
    out.push_back(x0);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

} // namespace

CosetSystem cosets(const IntMatrix& b) {
    int n = b.n();
    SmithData s = smith(b);

    // U*B*V = D means B Z^n = U^-1 D Z^n, so {U^-1 v : v in prod [0, D_i)}
    // is a complete set of representatives.
    long long udet = det(s.U);
    IntMatrix uinv = adjugate(s.U);
    if (udet == -1) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) uinv.at(i, j) = -uinv.at(i, j);
    } else if (udet != 1) {
        throw std::logic_error("smith U not unimodular");
    }

    std::vector<std::vector<Int>> basis(n, std::vector<Int>(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) basis[j][i] = b.at(i, j);

    CosetSystem cs;
    cs.b = b;
    std::vector<long long> v(n, 0);
    while (true) {
        std::vector<Int> t(n, 0);
        for (int i = 0; i < n; ++i) {
            Int acc = 0;
            for (int j = 0; j < n; ++j) acc += Int(uinv.at(i, j)) * v[j];
            t[i] = acc;
        }
        std::vector<Int> reduced = lex_min_nonneg(basis, std::move(t));
        std::vector<long long> rep(n);
        for (int i = 0; i < n; ++i) rep[i] = narrow_ll(reduced[i], "coset representative");
        cs.reps.push_back(std::move(rep));

        int i = n - 1;
        while (i >= 0 && v[i] + 1 == s.D.at(i, i)) v[i--] = 0;
        if (i < 0) break;
        ++v[i];
    }
    std::sort(cs.reps.begin(), cs.reps.end());
    if (!cs.reps.empty() && !cs.reps.front().empty() &&
        std::any_of(cs.reps.front().begin(), cs.reps.front().end(),
                    [](long long x) { return x != 0; }))
        throw std::logic_error("coset zero representative missing");
    long long k = det(b);
    if (k < 0) k = -k;
    if ((long long)cs.reps.size() != k)
        throw std::logic_error("coset count does not match |det|");
    return cs;
}

std::optional<CosetSystem> theorem_reps(const IntMatrix& b, int column_j) {
    int n = b.n();
    if (column_j < 0 || column_j >= n) throw std::invalid_argument("column index out of range");
    long long k = det(b);
    if (k == 0) throw std::domain_error("theorem_reps(): singular matrix");
    if (k < 0) k = -k;
    IntMatrix adj = adjugate(b);
    bool coprime = false;
    for (int i = 0; i < n && !coprime; ++i)
        coprime = gcd_ll(adj.at(i, column_j), k) == 1;
    if (!coprime) return std::nullopt;
    CosetSystem cs;
    cs.b = b;
    for (long long r = 0; r < k; ++r) {
        std::vector<long long> rep(n, 0);
        rep[column_j] = r;
        cs.reps.push_back(std::move(rep));
    }
    return cs;
}

bool cosets_equivalent(const IntMatrix& b, const std::vector<long long>& x,
                       const std::vector<long long>& y) {
    // x ~ y iff adj(B)(x - y) is divisible componentwise by det(B).
    int n = b.n();
    Int d = det_big(b);
    if (d == 0) throw std::domain_error("singular matrix");
    IntMatrix adj = adjugate(b);
    for (int i = 0; i < n; ++i) {
        Int acc = 0;
        for (int j = 0; j < n; ++j) acc += Int(adj.at(i, j)) * (x[j] - y[j]);
        if (acc % d != 0) return false;
    }
    return true;
}

namespace {

std::vector<long long> integral_weights(const std::vector<Rational>& weights) {
    long long lcm = 1;
    for (const auto& w : weights) lcm = lcm / gcd_ll(lcm, w.den()) * w.den();
    std::vector<long long> out;
    for (const auto& w : weights) out.push_back(w.num() * (lcm / w.den()));
    return out;
}

IntMatrix canonical_form(const IntMatrix& m) {
    // Representative of the class under column permutations and sign flips:
    // the lexicographically greatest row-major variant with positive
    // determinant (picks I for the identity class and [[1,1],[-1,1]] for the
    // smallest nontrivial one).
    int n = m.n();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<IntMatrix> best;
    do {
        for (int signs = 0; signs < (1 << n); ++signs) {
            IntMatrix cand(n);
            for (int j = 0; j < n; ++j) {
                int s = (signs >> j) & 1 ? -1 : 1;
                for (int i = 0; i < n; ++i) cand.at(i, j) = s * m.at(i, perm[j]);
            }
            if (det(cand) <= 0) continue;
            if (!best || *best < cand) best = cand;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!best) throw std::logic_error("no positive-determinant variant");
    return *best;
}

} // namespace

std::vector<IntMatrix> search_orthogonal(int n, const std::vector<Rational>& weights,
                                         int entry_bound, long long max_det) {
    if (entry_bound < 1) throw std::invalid_argument("entry bound must be >= 1");
    if (int(weights.size()) != n) throw std::invalid_argument("weight vector length mismatch");
    std::vector<long long> lw = integral_weights(weights);

    // All nonzero candidate columns.
    std::vector<std::vector<long long>> cols;
    std::vector<long long> c(n, -entry_bound);
    while (true) {
        if (std::any_of(c.begin(), c.end(), [](long long x) { return x != 0; }))
            cols.push_back(c);
        int i = n - 1;
        while (i >= 0 && c[i] == entry_bound) c[i--] = -entry_bound;
        if (i < 0) break;
        ++c[i];
    }

    auto dot = [&](const std::vector<long long>& a, const std::vector<long long>& b) {
        long long s = 0;
        for (int i = 0; i < n; ++i) s += lw[i] * a[i] * b[i];
        return s;
    };

    std::set<IntMatrix> found;
    std::vector<const std::vector<long long>*> chosen;
    std::function<void()> rec = [&]() {
        if (int(chosen.size()) == n) {
            IntMatrix m(n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) m.at(i, j) = (*chosen[j])[i];
            long long d = det(m);
            if (d == 0 || std::abs(d) > max_det) return;
            found.insert(canonical_form(m));
            return;
        }
        for (const auto& cand : cols) {
            bool ok = true;
            for (const auto* prev : chosen)
                if (dot(*prev, cand) != 0) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            chosen.push_back(&cand);
            rec();
            chosen.pop_back();
        }
    };
    rec();

    std::vector<IntMatrix> out(found.begin(), found.end());
    std::sort(out.begin(), out.end(), [](const IntMatrix& a, const IntMatrix& b) {
        long long da = det(a), db = det(b);
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

std::vector<ExponentSystemSolution> solve_exponent_system(
    const std::vector<long long>& targets, int entry_bound, long long max_weight) {
    int n = int(targets.size());
    for (long long t : targets)
        if (t < 1) throw std::invalid_argument("targets must be positive");
    if (max_weight <= 0) max_weight = *std::max_element(targets.begin(), targets.end());

    std::vector<ExponentSystemSolution> out;
    std::vector<long long> l(n, 1);

    auto columns_for = [&](long long target, const std::vector<long long>& lv) {
        std::vector<std::vector<long long>> cands;
        std::vector<long long> c(n, 0);
        std::function<void(int, long long)> rec = [&](int i, long long rest) {
            if (i == n) {
                if (rest == 0) cands.push_back(c);
                return;
            }
            for (long long v = -entry_bound; v <= entry_bound; ++v) {
                long long used = lv[i] * v * v;
                if (used > rest) continue;
                c[i] = v;
                rec(i + 1, rest - used);
            }
            c[i] = 0;
        };
        rec(0, target);
        return cands;
    };

    std::function<void(int)> weight_rec = [&](int i) {
        if (i == n) {
            std::vector<std::vector<std::vector<long long>>> per_col;
            for (long long t : targets) {
                per_col.push_back(columns_for(t, l));
                if (per_col.back().empty()) return;
            }
            std::vector<const std::vector<long long>*> chosen;
            std::function<void(int)> build = [&](int j) {
                if (j == n) {
                    IntMatrix m(n);
                    for (int cjs = 0; cjs < n; ++cjs)
                        for (int r = 0; r < n; ++r) m.at(r, cjs) = (*chosen[cjs])[r];
                    if (det(m) == 0) return;
                    out.push_back({l, m});
                    return;
                }
                for (const auto& cand : per_col[j]) {
                    bool ok = true;
                    for (int pj = 0; pj < j && ok; ++pj) {
                        long long s = 0;
                        for (int r = 0; r < n; ++r) s += l[r] * (*chosen[pj])[r] * cand[r];
                        ok = s == 0;
                    }
                    if (!ok) continue;
                    chosen.push_back(&cand);
                    build(j + 1);
                    chosen.pop_back();
                }
            };
            build(0);
            return;
        }
        for (l[i] = 1; l[i] <= max_weight; ++l[i]) weight_rec(i + 1);
        l[i] = 1;
    };
    weight_rec(0);

    std::sort(out.begin(), out.end(), [](const ExponentSystemSolution& a,
                                         const ExponentSystemSolution& b) {
        if (a.weights != b.weights) return a.weights < b.weights;
        return a.b < b.b;
    });
    return out;
}

} // namespace thetaforge
