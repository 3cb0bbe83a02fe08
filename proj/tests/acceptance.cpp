// Acceptance suite: runs every exit criterion at its stated scale and prints
// one pass/fail line per criterion. Exit status is nonzero if any fails.

#include "thetaforge/corpus.hpp"
#include "thetaforge/decompose.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <iostream>
#include <random>
#include <set>

using namespace thetaforge;
using boost::multiprecision::cpp_int;

namespace {

int failures = 0;

void report(int number, bool ok, const std::string& what) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << what << "\n";
    if (!ok) ++failures;
}

std::mt19937_64 rng(20260810);

Monomial q(Rational e) { return Monomial::q_power(e); }

// --- 1: corpus certification at order 40 ------------------------------------

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    Corpus corpus = Corpus::load_directory(THETAFORGE_TEST_CORPUS_DIR);
    bool ok = corpus.size() >= 45;
    auto reports = verify_all(corpus, Rational(40));
    size_t pass = 0, disc = 0;
    for (const auto& r : reports) {
        if (r.status == VerifyStatus::Pass) ++pass;
        if (r.status == VerifyStatus::PaperDiscrepancy) ++disc;
        if (r.status == VerifyStatus::Fail) {
            std::cout << "  [criterion 1] failing entry: " << r.name << "\n";
            ok = false;
        }
    }
    // every discrepancy-marked literal ships with a passing corrected form
    for (const auto& id : corpus.entries()) {
        if (!id.discrepancy) continue;
        const Identity* fix = corpus.find(id.name + ".corrected");
        if (!fix) {
            std::cout << "  [criterion 1] " << id.name << " lacks a corrected form\n";
            ok = false;
        }
    }
    for (const char* name :
         {"quintuple", "septuple", "winquist", "sextuple", "sigma-three-term",
          "hahn-vanishing", "shen", "q8"}) {
        const Identity* id = corpus.find(name);
        if (!id || verify(*id, Rational(std::string(name) == "winquist" ? 15 : 30)).status !=
                       VerifyStatus::Pass) {
            std::cout << "  [criterion 1] named entry failed: " << name << "\n";
            ok = false;
        }
    }
    // q8 additionally via the differentiate/substitute pipeline at order 30
    {
        Rational order(30);
        const Identity* qq81 = corpus.find("winquist-analogue-squares");
        Series lhs = evaluate(qq81->lhs, order);
        Series rhs = evaluate(qq81->rhs, order);
        Series want = -evaluate(parse_expr("16*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)"),
                                order);
        for (const Series* s : {&lhs, &rhs}) {
            Series fin = s->differentiated("b").substituted_one("b")
                             .scaled(Monomial::symbol("a", Rational(-1)))
                             .differentiated("a").differentiated("a").substituted_one("a");
            if (first_mismatch(fin, want, order)) {
                std::cout << "  [criterion 1] q8 derivative pipeline mismatch\n";
                ok = false;
            }
        }
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0).count();
    report(1, ok, "corpus certification at order 40 (" + std::to_string(corpus.size()) +
                      " entries: " + std::to_string(pass) + " pass, " + std::to_string(disc) +
                      " paper-discrepancy with passing corrections; q8 via both routes; " +
                      std::to_string(secs) + " s)");
}

// --- 2: decomposition soundness, 200 randomized inputs ----------------------

ThetaFactor random_decomposable(const std::string& name, long long l) {
    std::uniform_int_distribution<int> alpha(0, int(2 * l)), se(-2, 2), sgn(0, 1);
    Rational qa(alpha(rng), 2);
    Monomial a = q(qa), b = q(Rational(l) - qa);
    int e = se(rng);
    if (e) {
        a = a * Monomial::symbol(name, Rational(e));
        b = b * Monomial::symbol(name, Rational(-e));
    }
    if (sgn(rng)) {
        a = a.negated();
        b = b.negated();
    }
    return ThetaFactor(a, b);
}

IntMatrix random_orthogonal(const std::vector<Rational>& weights, int bound) {
    int n = int(weights.size());
    std::uniform_int_distribution<long long> e(-bound, bound);
    while (true) {
        IntMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m.at(i, j) = e(rng);
        if (det(m) == 0) continue;
        if (check_orthogonal(m, weights).ok) return m;
    }
}

void criterion2() {
    Rational order(30);
    std::uniform_int_distribution<int> dims(1, 3), ls(1, 3);
    static const char* names[] = {"x", "y", "z"};
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        int n = dims(rng);
        std::vector<ThetaFactor> factors;
        std::vector<Rational> weights;
        for (int i = 0; i < n; ++i) {
            long long l = ls(rng);
            factors.push_back(random_decomposable(names[i], l));
            weights.push_back(Rational(l));
        }
        IntMatrix b = random_orthogonal(weights, 2);
        ThetaCombo combo = decompose(prepare_input(factors, b).input);
        ThetaCombo direct;
        ComboTerm t;
        t.factors = factors;
        direct.push(t);
        if (first_mismatch(expand_combo(direct, order), expand_combo(combo, order), order)) {
            std::cout << "  [criterion 2] mismatch for B = " << b.str() << "\n";
            ok = false;
        }
    }
    report(2, ok, "decomposition soundness on 200 randomized inputs at order 30, exact");
}

// --- 3: jacobi triple product at order 200 ----------------------------------

void criterion3() {
    Rational order(200);
    std::uniform_int_distribution<int> qa(-2, 4), l(1, 4), se(-2, 2), sgn(0, 1), nsym(0, 2);
    static const char* names[] = {"a", "b"};
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
        Monomial x = q(Rational(qa(rng)));
        Monomial y = q(Rational(l(rng)) - x.qexp());
        if (!(x.qexp() + y.qexp() > Rational(0))) {
            --i;
            continue;
        }
        int ns = nsym(rng);
        for (int k = 0; k < ns; ++k) {
            int e = se(rng);
            if (!e) continue;
            x = x * Monomial::symbol(names[k], Rational(e));
            y = y * Monomial::symbol(names[k], Rational(se(rng)));
        }
        if (sgn(rng)) x = x.negated();
        ThetaFactor f(x, y);
        if (first_mismatch(expand_theta(f, order), expand_product_form(f, order), order)) {
            std::cout << "  [criterion 3] JTP mismatch for f(" << x.str() << ", " << y.str()
                      << ")\n";
            ok = false;
        }
    }
    report(3, ok, "jacobi triple product: sum vs product form at order 200, 20 random factors");
}

// --- 4: lattice invariants on 500 random matrices ---------------------------

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix c(a.n());
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j) {
            long long s = 0;
            for (int k = 0; k < a.n(); ++k) s += a.at(i, k) * b.at(k, j);
            c.at(i, j) = s;
        }
    return c;
}

void criterion4() {
    bool ok = true;
    std::uniform_int_distribution<int> dims(1, 4);
    std::uniform_int_distribution<long long> ent(-3, 3);
    int congruence_checked = 0;
    for (int trial = 0; trial < 500 && ok; ++trial) {
        int n = dims(rng);
        IntMatrix b(n);
        do {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) b.at(i, j) = ent(rng);
        } while (det(b) == 0);
        long long k = det(b);
        if (k < 0) k = -k;

        SmithData s = smith(b);
        if (!(matmul(matmul(s.U, b), s.V) == s.D)) {
            std::cout << "  [criterion 4] UBV != D for " << b.str() << "\n";
            ok = false;
        }
        for (int i = 0; i + 1 < n; ++i)
            if (s.D.at(i + 1, i + 1) % s.D.at(i, i) != 0) ok = false;

        CosetSystem cs = cosets(b);
        if ((long long)cs.reps.size() != k) {
            std::cout << "  [criterion 4] |reps| != |det| for " << b.str() << "\n";
            ok = false;
        }
        // pairwise inequivalence: rational-solve for small systems, the
        // unimodular-transform criterion for large ones
        if (k <= 40) {
            for (size_t i = 0; i < cs.reps.size() && ok; ++i)
                for (size_t j = i + 1; j < cs.reps.size() && ok; ++j)
                    if (cosets_equivalent(b, cs.reps[i], cs.reps[j])) {
                        std::cout << "  [criterion 4] equivalent reps for " << b.str() << "\n";
                        ok = false;
                    }
        } else {
            std::set<std::vector<long long>> images;
            for (const auto& r : cs.reps) {
                std::vector<long long> u(n, 0);
                for (int i = 0; i < n; ++i) {
                    long long acc = 0;
                    for (int j = 0; j < n; ++j) acc += s.U.at(i, j) * r[j];
                    long long d = s.D.at(i, i);
                    u[i] = ((acc % d) + d) % d;
                }
                if (!images.insert(u).second) {
                    std::cout << "  [criterion 4] equivalent reps for " << b.str() << "\n";
                    ok = false;
                    break;
                }
            }
        }
        // congruence-solving oracle for n <= 3, |det| <= 30
        if (n <= 3 && k <= 30) {
            ++congruence_checked;
            long long d = s.sk.back();
            std::vector<std::vector<long long>> translates;
            std::vector<long long> yv(n, 0);
            while (true) {
                auto by = b.apply(yv);
                bool sol = true;
                for (long long v : by) sol = sol && v % d == 0;
                if (sol) {
                    std::vector<long long> t(n);
                    for (int i = 0; i < n; ++i) t[i] = by[i] / d;
                    translates.push_back(std::move(t));
                }
                int i = n - 1;
                while (i >= 0 && yv[i] + 1 == d) yv[i--] = 0;
                if (i < 0) break;
                ++yv[i];
            }
            if ((long long)translates.size() != k) {
                std::cout << "  [criterion 4] congruence oracle count mismatch\n";
                ok = false;
            } else {
                std::vector<bool> used(translates.size(), false);
                for (const auto& r : cs.reps) {
                    int match = -1;
                    for (size_t i = 0; i < translates.size(); ++i)
                        if (!used[i] && cosets_equivalent(b, r, translates[i])) {
                            match = int(i);
                            break;
                        }
                    if (match < 0) {
                        std::cout << "  [criterion 4] congruence oracle class mismatch\n";
                        ok = false;
                        break;
                    }
                    used[match] = true;
                }
            }
        }
    }
    report(4, ok, "lattice invariants on 500 random matrices (congruence oracle on " +
                      std::to_string(congruence_checked) + " of them)");
}

// --- 5: paper constants ------------------------------------------------------

void criterion5() {
    bool ok = true;
    auto expect_det = [&](std::vector<long long> rows, long long want) {
        int n = 1;
        while (n * n < int(rows.size())) ++n;
        IntMatrix m(n, rows);
        if (det(m) != want) {
            std::cout << "  [criterion 5] det(" << m.str() << ") != " << want << "\n";
            ok = false;
        }
    };
    expect_det({1, 1, -1, 1}, 2);
    expect_det({1, 1, 1, 2, -1, 0, 1, 1, -1}, 6);
    expect_det({1, 1, 1, 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, -1, 1, -1}, 16);
    expect_det({1, 1, 3, 1, -1, -3, 0, 3, -2}, 22);
    expect_det({1, 0, -1, -1, 1, 1, 0, 0, 2, 0, 0, 1, 1, 0, 1, 0, -1, 1, 0, 1,
                -1, 0, -1, 1, 1}, 24);

    IntMatrix b6(3, {1, 1, 1, 2, -1, 0, 1, 1, -1});
    if (!(adjugate(b6) == IntMatrix(3, {1, 2, 1, 2, -2, 2, 3, 0, -3}))) {
        std::cout << "  [criterion 5] adjugate of the det-6 matrix is wrong\n";
        ok = false;
    }

    auto sols = solve_exponent_system({7, 21}, 4);
    bool hahn = false;
    for (const auto& s : sols)
        if (s.weights == std::vector<long long>{1, 3} &&
            s.b == IntMatrix(2, {2, 3, -1, 2}))
            hahn = true;
    if (!hahn) {
        std::cout << "  [criterion 5] hahn solution missing from solve_exponent_system\n";
        ok = false;
    }

    // determinant formula on every searched orthogonal matrix
    int checked = 0;
    auto check_weights = [&](int n, std::vector<Rational> w, int bound, long long maxdet) {
        for (const auto& m : search_orthogonal(n, w, bound, maxdet)) {
            auto r = check_orthogonal(m, w);
            Rational lhs = Rational(det(m)) * Rational(det(m));
            for (const auto& wi : w) lhs *= wi;
            Rational rhs(1);
            for (const auto& L : r.diagonal) rhs *= L;
            if (!(lhs == rhs)) {
                std::cout << "  [criterion 5] det formula fails for " << m.str() << "\n";
                ok = false;
            }
            ++checked;
        }
    };
    check_weights(2, {Rational(1), Rational(1)}, 3, 40);
    check_weights(2, {Rational(1), Rational(2)}, 2, 30);
    check_weights(2, {Rational(1), Rational(3)}, 2, 30);
    check_weights(3, {Rational(1), Rational(1), Rational(1)}, 2, 30);
    report(5, ok, "paper constants: dets 2/6/16/22/24, the displayed adjugate, the hahn "
                  "solution, det formula on " + std::to_string(checked) + " searched matrices");
}

// --- 6: structural fidelity ---------------------------------------------------

void criterion6() {
    bool ok = true;
    std::uniform_int_distribution<int> ls(1, 3);
    auto half = [](long long v) { return Rational(v, 2); };
    int done = 0;
    while (done < 40) {
        long long l1 = ls(rng), l2 = ls(rng);
        IntMatrix b = random_orthogonal({Rational(l1), Rational(l2)}, 2);
        if (det(b) < 0) {
            std::swap(b.at(0, 0), b.at(0, 1));
            std::swap(b.at(1, 0), b.at(1, 1));
        }
        if (gcd_ll(b.at(1, 0), b.at(0, 0) * b.at(1, 1)) != 1) continue;
        ++done;
        ThetaFactor f1 = random_decomposable("x", l1), f2 = random_decomposable("y", l2);
        auto treps = theorem_reps(b, 0);
        if (!treps) {
            std::cout << "  [criterion 6] theorem reps unexpectedly refused\n";
            ok = false;
            continue;
        }
        ThetaCombo combo = decompose({{f1, f2}, b, *treps});
        const Monomial &a = f1.first(), &bb = f1.second();
        const Monomial &c = f2.first(), &d = f2.second();
        long long k = det(b);
        ThetaCombo expect;
        for (long long r = 0; r < k; ++r) {
            ComboTerm t;
            t.coeff = a.pow(half(r * r + r)) * bb.pow(half(r * r - r));
            for (int col = 0; col < 2; ++col) {
                long long b1 = b.at(0, col), b2 = b.at(1, col);
                t.factors.emplace_back(
                    a.pow(half(b1 * b1 + b1) + Rational(b1 * r)) *
                        bb.pow(half(b1 * b1 - b1) + Rational(b1 * r)) *
                        c.pow(half(b2 * b2 + b2)) * d.pow(half(b2 * b2 - b2)),
                    a.pow(half(b1 * b1 - b1) - Rational(b1 * r)) *
                        bb.pow(half(b1 * b1 + b1) - Rational(b1 * r)) *
                        c.pow(half(b2 * b2 - b2)) * d.pow(half(b2 * b2 + b2)));
            }
            expect.push(std::move(t));
        }
        expect.canonicalize();
        if (!(combo == expect)) {
            std::cout << "  [criterion 6] two-theta structural mismatch for B = " << b.str()
                      << "\n";
            ok = false;
        }
    }

    // schroter a = b = 1: exactly the displayed two terms
    {
        Monomial x = Monomial::symbol("x"), y = Monomial::symbol("y");
        auto pre = schroter_matrix(SchroterClassic{1, 1});
        ThetaFactor tx = schroter_T(x, Rational(1)), ty = schroter_T(y, Rational(1));
        PreparedInput prep =
            prepare_input({tx, ty}, pre.b, ResidueWindow::Standard, pre.column);
        ThetaCombo combo = decompose(prep.input);
        ThetaCombo expect;
        for (long long n = 0; n < 2; ++n) {
            ComboTerm t;
            t.coeff = y.pow(Rational(n)) * q(Rational(n * n));
            t.factors = {schroter_T(x * y * q(Rational(2 * n)), Rational(2)),
                         schroter_T(x.inverse() * y * q(Rational(2 * n)), Rational(2))};
            expect.push(std::move(t));
        }
        expect.canonicalize();
        if (!(combo == expect) || combo.terms().size() != 2) {
            std::cout << "  [criterion 6] schroter structural mismatch\n";
            ok = false;
        }
    }
    report(6, ok, "structural fidelity: two-theta sum term-for-term on 40 gcd-valid inputs; "
                  "schroter a=b=1 gives the displayed k=2 terms");
}

// --- 7: negative controls ------------------------------------------------------

void criterion7() {
    Corpus corpus = Corpus::load_directory(THETAFORGE_TEST_CORPUS_DIR);
    bool ok = true;
    struct Control {
        const char* base;
        const char* side; // corrupted rhs
        Rational expect_qexp;
    };
    // Expected first-mismatch orders were frozen from the engine output and
    // cross-checked by hand against the lowest affected coefficient.
    std::vector<Control> controls = {
        // 4q psi^2(q^4) -> 3q psi^2(q^4): constant of psi^2 contributes at q^1
        {"phi-squared", "phi(q^2)*phi(q^2) + 3*q*psi(q^4)*psi(q^4)", Rational(1)},
        // drop the q psi(q^2) psi(q^14) term: its lowest term sits at q^1
        {"deg7", "psi(q^8)*phi(q^28) + q^6*phi(q^4)*psi(q^56)", Rational(1)},
        // f(q^2,q^3) -> f(q^2,q^4): the q^3 term of the product drops from
        // 2 (q*q^2 + 1*q^3) to 1
        {"sepcor2", "f(q, q^4)*f(q^2, q^4)", Rational(3)},
        // entry 30 (v) with coefficient 3: wrong already at the constant term
        {"entry30-v", "3*f(x^2*q^2, x^-2*q^2)*phi(q^2)", Rational(0)},
        // shen weight sign flipped on the m-character: first odd-m point is
        // m=+-1, n=0 at q^2, but the n=-1 terms already disagree at q^1
        {"shen", "latsum(m, n) { weight 1; qexp 2*m^2 + 2*m*n + 2*n^2 + n }", Rational(1)},
    };
    for (const auto& c : controls) {
        const Identity* base = corpus.find(c.base);
        if (!base) {
            ok = false;
            continue;
        }
        Identity bad = *base;
        bad.rhs = parse_expr(c.side);
        bad.discrepancy = false;
        VerifyReport rep = verify(bad, Rational(30));
        if (rep.status != VerifyStatus::Fail || !rep.mismatch ||
            !(rep.mismatch->key.qexp == c.expect_qexp)) {
            std::cout << "  [criterion 7] control " << c.base << ": expected mismatch at q^"
                      << c.expect_qexp.str() << ", got "
                      << (rep.mismatch ? rep.mismatch->key.qexp.str() : std::string("none"))
                      << " (status " << to_string(rep.status) << ")\n";
            ok = false;
        }
    }
    report(7, ok, "five corrupted entries fail with mismatches at the expected q-orders");
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
              << secs << " s total)\n";
    return failures == 0 ? 0 : 1;
}
