#pragma once

#include "thetaforge/lattice.hpp"
#include "thetaforge/theta.hpp"

#include <variant>

namespace thetaforge {

/// Which complete residue window theorem-style representatives use.
enum class ResidueWindow {
    Standard, // r in [0, k)
    Centered, // r in [floor(-k/2)+1, floor(k/2)]
};

struct DecompositionInput {
    std::vector<ThetaFactor> factors; // each decomposable, weight l_i
    IntMatrix b;                      // generalized orthogonal for l
    CosetSystem reps;                 // representatives of Z^n / B Z^n
};

/// How the coset representatives were obtained, for labeling output.
enum class RepsKind { Theorem, General };

struct PreparedInput {
    DecompositionInput input;
    RepsKind kind;
    int theorem_column = -1; // valid when kind == Theorem
};

/// Builds a DecompositionInput from factors and a matrix: validates the
/// orthogonality relation, then tries theorem-style representatives on each
/// column (smallest first, or only `column` when given) and falls back to
/// general Smith-form cosets when no adjugate entry is coprime to the
/// determinant.
PreparedInput prepare_input(std::vector<ThetaFactor> factors, const IntMatrix& b,
                            ResidueWindow window = ResidueWindow::Standard,
                            std::optional<int> column = std::nullopt);

/// The exact-covering-system decomposition: one term per coset representative
/// t, with coefficient prod_i a_i^{(t_i^2+t_i)/2} b_i^{(t_i^2-t_i)/2} and j-th
/// factor built from column j of B with the +-b_ij t_i twists. Expanding the
/// result equals expanding the input product at every order.
ThetaCombo decompose(const DecompositionInput& input);

enum class CombineMode { Sum, Diff };

/// Decomposition of prod f(a_i,b_i) +- prod f(-a_i,-b_i). Requires every
/// column sum of B to be even; keeps the representatives of matching parity
/// with doubled coefficients.
ThetaCombo decompose_sum_diff(const DecompositionInput& input, CombineMode mode);

/// Schroter-family presets: the matrix and weight vector each corollary of
/// the two-theta theorem uses.
struct SchroterClassic { long long a, b; };
struct SchroterGeneralized { long long k1, k2, a, b; };
struct SchroterGeneralizedDiv { long long k1, k2, a, b; }; // needs k2|k1*b, k2|a
struct SchroterChuYan { long long alpha, beta, gamma; };    // needs gcd(alpha,gamma)=1
struct SchroterBBG { long long alpha, beta, m; };           // needs m > alpha*beta
struct SchroterKongLiu1 { long long k; };
struct SchroterKongLiu2 { long long k; };

using SchroterPreset = std::variant<SchroterClassic, SchroterGeneralized,
                                    SchroterGeneralizedDiv, SchroterChuYan,
                                    SchroterBBG, SchroterKongLiu1, SchroterKongLiu2>;

struct SchroterMatrix {
    IntMatrix b;
    std::vector<Rational> weights;
    int column = 1; // theorem column reproducing the displayed y^n-coefficients
};

SchroterMatrix schroter_matrix(const SchroterPreset& preset);

/// T(x, q^a) = sum_n x^n q^{a n^2} as a theta factor f(x q^a, q^a / x).
ThetaFactor schroter_T(const Monomial& x, const Rational& a);

/// Small dense rational matrix for quadratic forms.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(int n) : n_(n), e_(size_t(n) * n, Rational(0)) {}

    int n() const { return n_; }
    Rational& at(int i, int j) { return e_[size_t(i) * n_ + j]; }
    const Rational& at(int i, int j) const { return e_[size_t(i) * n_ + j]; }

private:
    int n_ = 0;
    std::vector<Rational> e_;
};

/// Decomposes sum_{x in Z^n} q^{x^T Q x} along the coset system of B into a
/// theta combination: requires Q symmetric positive definite and B^T Q B
/// diagonal. Expansion equality against the lattice sum is the contract.
ThetaCombo quadform_decompose(const RationalMatrix& q, const IntMatrix& b);

/// The lattice-sum form of sum_{x in Z^n} q^{x^T Q x}, for oracle comparisons.
LatticeSum quadform_lattice_sum(const RationalMatrix& q);

} // namespace thetaforge
