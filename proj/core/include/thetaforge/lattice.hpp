#pragma once

#include "thetaforge/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thetaforge {

/// Dense square integer matrix. Small dimensions only (covering-system
/// matrices here are at most 5x5); all arithmetic is exact.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(int n) : n_(n), e_(size_t(n) * n, 0) {}
    IntMatrix(int n, std::vector<long long> entries);

    static IntMatrix identity(int n);
    /// Parses row-major text like "1,1;-1,1" (';' separates rows).
    static IntMatrix parse(const std::string& text);

    int n() const { return n_; }
    long long& at(int i, int j) { return e_[size_t(i) * n_ + j]; }
    long long at(int i, int j) const { return e_[size_t(i) * n_ + j]; }
    const std::vector<long long>& entries() const { return e_; }

    std::vector<long long> column(int j) const;
    std::vector<long long> apply(const std::vector<long long>& x) const;

    friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
        return a.n_ == b.n_ && a.e_ == b.e_;
    }
    friend bool operator<(const IntMatrix& a, const IntMatrix& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.e_ < b.e_;
    }

    std::string str() const;

private:
    int n_ = 0;
    std::vector<long long> e_;
};

/// Exact determinant (fraction-free Bareiss elimination).
long long det(const IntMatrix& m);
/// Adjugate: m * adjugate(m) = det(m) * I.
IntMatrix adjugate(const IntMatrix& m);

/// Determinantal divisors d_0..d_n: d_k = gcd of all k x k minors (d_0 = 1).
std::vector<long long> determinantal_divisors(const IntMatrix& m);

struct SmithData {
    IntMatrix U, D, V;            // U*B*V = D, |det U| = |det V| = 1
    std::vector<long long> dk;    // determinantal divisors d_0..d_n
    std::vector<long long> sk;    // invariant factors s_1..s_n
};

/// Smith normal form with transforms; the divisor chain is recomputed from
/// minors as an independent cross-check. Rejects singular input.
SmithData smith(const IntMatrix& b);

struct OrthogonalityCheck {
    bool ok = false;
    std::vector<Rational> diagonal;                 // L_j = sum_i l_i b_ij^2
    struct Failure {
        int row, col;
        Rational value;
    };
    std::optional<Failure> failure;                 // first nonzero off-diagonal
};

/// Checks that B^T diag(l) B is diagonal for positive weights l.
OrthogonalityCheck check_orthogonal(const IntMatrix& b, const std::vector<Rational>& weights);

struct CosetSystem {
    IntMatrix b;
    std::vector<std::vector<long long>> reps;       // reps[0] is always 0
};

/// Complete set of coset representatives of Z^n / B Z^n via the Smith form,
/// each reduced to the lexicographically smallest nonnegative member of its
/// class. Rejects singular B.
CosetSystem cosets(const IntMatrix& b);

/// Theorem-style representatives {r e_j : 0 <= r < |det B|}, valid iff some
/// entry of column j of the adjugate is coprime to |det B|. Refusal (no such
/// entry) is a value, not an error.
std::optional<CosetSystem> theorem_reps(const IntMatrix& b, int column_j);

/// True iff x and y lie in the same class of Z^n / B Z^n (rational solve).
bool cosets_equivalent(const IntMatrix& b, const std::vector<long long>& x,
                       const std::vector<long long>& y);

/// All generalized-orthogonal matrices with entries in [-bound, bound] and
/// det in (0, max_det], deduplicated under column permutations and column
/// sign flips (canonical form: lexicographically smallest row-major variant
/// with positive determinant). Sorted by (det, entries).
std::vector<IntMatrix> search_orthogonal(int n, const std::vector<Rational>& weights,
                                         int entry_bound, long long max_det);

struct ExponentSystemSolution {
    std::vector<long long> weights;
    IntMatrix b;
};

/// All (l, B) with positive integer weights and entries bounded by
/// `entry_bound` such that B^T diag(l) B = diag(targets). No symmetry
/// deduplication; sorted canonically. `max_weight` defaults to max(targets).
std::vector<ExponentSystemSolution> solve_exponent_system(
    const std::vector<long long>& targets, int entry_bound, long long max_weight = 0);

} // namespace thetaforge
