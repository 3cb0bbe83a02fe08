#pragma once

#include "thetaforge/theta.hpp"

#include <memory>
#include <string>
#include <vector>

namespace thetaforge {

/// Expression tree for the identity DSL. Sums carry explicit +-1 signs;
/// products hold an integer scalar, a monomial coefficient, and the remaining
/// non-monomial factors in source order.
struct Ast {
    enum class Kind { Integer, Mono, Theta, Phi, Psi, Chi, Fq, Poch, Jt, LatSum, Product, Sum };

    Kind kind = Kind::Integer;
    long long int_value = 0;                  // Integer
    Monomial mono;                             // Mono
    Monomial arg1, arg2;                       // Theta/Poch/Jt (arg1 only: Phi..Fq)
    std::shared_ptr<const LatticeSum> lattice; // LatSum
    std::vector<std::shared_ptr<const Ast>> factors;              // Product
    std::vector<std::pair<int, std::shared_ptr<const Ast>>> terms; // Sum

    static std::shared_ptr<const Ast> integer(long long v);
    static std::shared_ptr<const Ast> monomial(Monomial m);
    static std::shared_ptr<const Ast> theta(Monomial a, Monomial b);
    static std::shared_ptr<const Ast> call(Kind k, Monomial a, Monomial b = Monomial::one());
    static std::shared_ptr<const Ast> lattice_sum(LatticeSum ls);
    static std::shared_ptr<const Ast> product(std::vector<std::shared_ptr<const Ast>> fs);
    static std::shared_ptr<const Ast> sum(std::vector<std::pair<int, std::shared_ptr<const Ast>>> ts);
};

using AstPtr = std::shared_ptr<const Ast>;

bool ast_equal(const Ast& a, const Ast& b);

/// Parse error with 1-based source position.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int col);
    int line, col;
};

/// Parses one expression; trailing input is an error.
AstPtr parse_expr(const std::string& text);

/// Canonical form: flattened sums with hoisted signs, merged monomial and
/// integer factors. print() emits this form; parse(print(x)) == canonical(x).
AstPtr canonical(const AstPtr& ast);

std::string print(const AstPtr& ast);

/// Expands the expression exactly for all q-exponents <= order.
Series evaluate(const AstPtr& ast, const Rational& order);

/// Lowers a pure theta expression (sums of monomial-weighted f/phi/psi/fq
/// products) to a ThetaCombo, preserving term, factor, and argument order;
/// throws std::domain_error otherwise.
ThetaCombo lower_theta_combo(const AstPtr& ast);

/// DSL text of a combo (inverse of lower_theta_combo up to canonical form).
std::string print_combo(const ThetaCombo& combo);
AstPtr combo_to_ast(const ThetaCombo& combo);

} // namespace thetaforge
