#include "thetaforge/corpus.hpp"
#include "thetaforge/decompose.hpp"

#include <doctest.h>

#include <set>

using namespace thetaforge;

namespace {

const Corpus& corpus() {
    static Corpus c = Corpus::load_directory(THETAFORGE_TEST_CORPUS_DIR);
    return c;
}

} // namespace

TEST_CASE("corpus loads with at least 45 self-contained entries") {
    CHECK(corpus().size() >= 45);
    std::set<std::string> names;
    for (const auto& id : corpus().entries()) {
        CHECK(names.insert(id.name).second); // unique names
        CHECK(id.lhs != nullptr);
        CHECK(id.rhs != nullptr);
        CHECK(id.order_hint > Rational(0));
    }
}

TEST_CASE("expected entries are present") {
    CHECK(corpus().find("quintuple"));
    CHECK(corpus().find("septuple"));
    CHECK(corpus().find("winquist"));
    CHECK(corpus().find("phi-squared"));
    CHECK(corpus().find("sextuple"));
    CHECK(corpus().find("sigma-three-term"));
    CHECK(corpus().find("hahn-vanishing"));
    CHECK(corpus().find("shen"));
    const Identity* q8 = corpus().find("q8");
    REQUIRE(q8);
    // lhs is the 16 f(-q,-q^2)^8 combo, rhs a lattice sum with cubic weights
    CHECK(lower_theta_combo(q8->lhs).terms().size() == 1);
    REQUIRE(q8->rhs->kind == Ast::Kind::LatSum);
    int maxdeg = 0;
    for (const auto& s : q8->rhs->lattice->summands())
        maxdeg = std::max(maxdeg, s.weight.degree());
    CHECK(maxdeg == 3);
    // family lookup by prefix
    CHECK(corpus().find_all("phi-phi").size() >= 4);
}

TEST_CASE("every correction attaches to a discrepancy-marked base") {
    int corrections = 0;
    for (const auto& id : corpus().entries()) {
        if (!id.is_correction) continue;
        ++corrections;
        const Identity* base = corpus().find(id.name.substr(0, id.name.size() - 10));
        REQUIRE(base);
        CHECK(base->discrepancy);
        CHECK(!id.discrepancy);
    }
    CHECK(corrections >= 5);
}

TEST_CASE("verify: quintuple passes at order 40") {
    VerifyReport rep = verify(*corpus().find("quintuple"), Rational(40));
    CHECK(rep.status == VerifyStatus::Pass);
    CHECK(!rep.mismatch);
}

TEST_CASE("verify: hahn's combination expands to zero") {
    VerifyReport rep = verify(*corpus().find("hahn-vanishing"), Rational(40));
    CHECK(rep.status == VerifyStatus::Pass);
}

TEST_CASE("verify: corrupted phi-squared fails at q^1") {
    // 4 q psi^2(q^4) -> 3 q psi^2(q^4)
    Identity bad = *corpus().find("phi-squared");
    bad.rhs = parse_expr("phi(q^2)*phi(q^2) + 3*q*psi(q^4)*psi(q^4)");
    VerifyReport rep = verify(bad, Rational(30));
    REQUIRE(rep.status == VerifyStatus::Fail);
    REQUIRE(rep.mismatch);
    CHECK(rep.mismatch->key.qexp == Rational(1));
    CHECK(rep.mismatch->key.vexp.empty());
    CHECK(rep.mismatch->lhs == 4);
    CHECK(rep.mismatch->rhs == 3);
}

TEST_CASE("verify: order 0 passes trivially on the constant term") {
    VerifyReport rep = verify(*corpus().find("phi-squared"), Rational(0));
    CHECK(rep.status == VerifyStatus::Pass);
}

TEST_CASE("verification is monotone in the order") {
    const Identity* id = corpus().find("sepcor2");
    REQUIRE(id);
    for (long long o : {0, 5, 10, 20, 30})
        CHECK(verify(*id, Rational(o)).status == VerifyStatus::Pass);
}

TEST_CASE("discrepancy entries report paper-discrepancy with a mismatch") {
    const Identity* lit = corpus().find("shen-theta-form");
    REQUIRE(lit);
    REQUIRE(lit->discrepancy);
    VerifyReport rep = verify(*lit, Rational(20));
    CHECK(rep.status == VerifyStatus::PaperDiscrepancy);
    REQUIRE(rep.mismatch);
    CHECK(rep.mismatch->key.qexp == Rational(1));
    VerifyReport cor = verify(*corpus().find("shen-theta-form.corrected"), Rational(20));
    CHECK(cor.status == VerifyStatus::Pass);
}

TEST_CASE("expansion failures surface as failing reports, not exceptions") {
    Identity bad;
    bad.name = "bad";
    bad.order_hint = Rational(10);
    bad.lhs = parse_expr("poch(a; b)"); // base without positive q-exponent
    bad.rhs = parse_expr("0");
    VerifyReport rep = verify(bad);
    CHECK(rep.status == VerifyStatus::Fail);
    CHECK(!rep.error.empty());
}

TEST_CASE("report formats carry the schema fields") {
    std::vector<VerifyReport> reps = {verify(*corpus().find("phi-squared"), Rational(10))};
    std::string json = report_json(reps);
    for (const char* field : {"\"name\"", "\"order\"", "\"status\"", "\"mismatch\"", "\"millis\""})
        CHECK(json.find(field) != std::string::npos);
    std::string table = report_table(reps);
    CHECK(table.find("phi-squared") != std::string::npos);
    CHECK(table.find("pass") != std::string::npos);
    CHECK(!any_failure(reps));
}

// Re-derivability: corpus identities whose proofs cite a specific matrix are
// reproduced by running the decomposition engine with that matrix.

namespace {

Series eval_at(const AstPtr& ast, Rational order) { return evaluate(ast, order); }

void check_rederivation(const std::string& entry, const std::string& product_expr,
                        const IntMatrix& b, Rational order) {
    const Identity* id = corpus().find(entry);
    REQUIRE(id);
    ThetaCombo product = lower_theta_combo(parse_expr(product_expr));
    REQUIRE(product.terms().size() == 1);
    PreparedInput prep = prepare_input(product.terms()[0].factors, b);
    ThetaCombo combo = decompose(prep.input);
    Series via = expand_combo(combo, order);
    Series lhs = eval_at(id->lhs, order);
    CHECK(!first_mismatch(lhs, via, order));
    Series rhs = eval_at(id->rhs, order);
    CHECK(!first_mismatch(rhs, via, order));
}

} // namespace

TEST_CASE("re-derivation: phi-squared via [[1,1],[-1,1]]") {
    check_rederivation("phi-squared", "phi(q)*phi(q)", IntMatrix(2, {1, 1, -1, 1}), Rational(30));
}

TEST_CASE("re-derivation: hahn's combination via l=(1,3), B=[[2,3],[-1,2]]") {
    // The product f(-1,-q) f(-1,-q^3) expands to zero; its decomposition along
    // the hahn matrix is exactly the (doubled) vanishing combination.
    ThetaCombo product = lower_theta_combo(
        parse_expr("f(-1, -q)*f(-1, -q^3)"));
    PreparedInput prep = prepare_input(product.terms()[0].factors, IntMatrix(2, {2, 3, -1, 2}));
    ThetaCombo combo = decompose(prep.input);
    Rational order(40);
    Series via = expand_combo(combo, order);
    CHECK(via.is_zero());
    const Identity* id = corpus().find("hahn-vanishing");
    REQUIRE(id);
    Series lhs = eval_at(id->lhs, order);
    CHECK(lhs.is_zero());
}

TEST_CASE("re-derivation: the hadamard entry's corrected form via general cosets") {
    const Identity* cor = corpus().find("four-theta-hadamard.corrected");
    REQUIRE(cor);
    ThetaCombo product = lower_theta_combo(parse_expr(
        "f(z1*q, z1^-1)*f(z2*q, z2^-1)*f(z3*q, z3^-1)*f(z4*q, z4^-1)"));
    IntMatrix h(4, {1, 1, 1, 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, -1, 1, -1});
    PreparedInput prep = prepare_input(product.terms()[0].factors, h);
    CHECK(prep.kind == RepsKind::General); // theorem reps refused
    ThetaCombo combo = decompose(prep.input);
    Rational order(10);
    CHECK(!first_mismatch(eval_at(cor->rhs, order), expand_combo(combo, order), order));
    CHECK(!first_mismatch(eval_at(cor->lhs, order), expand_combo(combo, order), order));
}

TEST_CASE("re-derivation: the det-6 three-theta entry") {
    check_rederivation("three-theta-det6", "f(z1*q, z1^-1)*f(z2*q, z2^-1)*f(z3*q, z3^-1)",
                       IntMatrix(3, {1, 1, 1, 2, -1, 0, 1, 1, -1}), Rational(14));
}

TEST_CASE("q8 via the derivative pipeline") {
    // Differentiate the a^2/b^2 analogue in b, set b = 1, multiply by a^-1,
    // apply the euler operator twice in a, set a = 1: -16 (q;q)^8.
    Rational order(20);
    const Identity* qq81 = corpus().find("winquist-analogue-squares");
    REQUIRE(qq81);
    for (const AstPtr& side : {qq81->lhs, qq81->rhs}) {
        Series s = eval_at(side, order);
        Series step = s.differentiated("b").substituted_one("b").scaled(
            Monomial::symbol("a", Rational(-1)));
        Series fin = step.differentiated("a").differentiated("a").substituted_one("a");
        Series expect =
            eval_at(parse_expr("16*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)*fq(q)"), order);
        CHECK(!first_mismatch(fin, -expect, order));
    }
    // And the q81 intermediate display matches the once-differentiated form.
    const Identity* q81 = corpus().find("winquist-analogue-derivative");
    REQUIRE(q81);
    Series lhs = eval_at(qq81->lhs, order);
    Series step = lhs.differentiated("b").substituted_one("b").scaled(
        Monomial::symbol("a", Rational(-1)));
    CHECK(!first_mismatch(step, eval_at(q81->lhs, order), order));
    CHECK(!first_mismatch(step, eval_at(q81->rhs, order), order));
}

TEST_CASE("print-parse round trip over the shipped corpus") {
    for (const auto& id : corpus().entries()) {
        for (const AstPtr& side : {id.lhs, id.rhs}) {
            std::string text = print(side);
            CAPTURE(id.name);
            AstPtr back = parse_expr(text);
            CHECK(ast_equal(*canonical(back), *canonical(side)));
            CHECK(print(back) == text);
        }
    }
}
