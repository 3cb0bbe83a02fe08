#include "thetaforge/corpus.hpp"
#include "thetaforge/decompose.hpp"

#include <benchmark/benchmark.h>

using namespace thetaforge;

namespace {

Monomial q(long long e) { return Monomial::q_power(Rational(e)); }

void bm_theta_expansion(benchmark::State& state) {
    ThetaFactor f(Monomial::symbol("a") * q(1), Monomial::symbol("a", Rational(-1)) * q(2));
    Rational order(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(expand_theta(f, order));
}
BENCHMARK(bm_theta_expansion)->Arg(50)->Arg(200)->Arg(800);

void bm_product_form(benchmark::State& state) {
    ThetaFactor f(Monomial::symbol("a") * q(1), Monomial::symbol("a", Rational(-1)) * q(2));
    Rational order(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(expand_product_form(f, order));
}
BENCHMARK(bm_product_form)->Arg(50)->Arg(200);

void bm_series_mul(benchmark::State& state) {
    Rational order(state.range(0));
    Series a = expand_product_form(ThetaFactor(Monomial::symbol("a") * q(1),
                                               Monomial::symbol("a", Rational(-1)) * q(1)),
                                   order);
    Series b = expand_product_form(ThetaFactor(Monomial::symbol("b") * q(1),
                                               Monomial::symbol("b", Rational(-1)) * q(2)),
                                   order);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(bm_series_mul)->Arg(30)->Arg(60);

void bm_smith(benchmark::State& state) {
    IntMatrix m(4, {2, -1, 3, 0, 1, 1, -2, 3, 0, 2, 1, -1, 3, 0, -1, 2});
    for (auto _ : state) benchmark::DoNotOptimize(smith(m));
}
BENCHMARK(bm_smith);

void bm_cosets(benchmark::State& state) {
    IntMatrix m(3, {1, 1, 3, 1, -1, -3, 0, 3, -2}); // det 22
    for (auto _ : state) benchmark::DoNotOptimize(cosets(m));
}
BENCHMARK(bm_cosets);

void bm_decompose_det6(benchmark::State& state) {
    std::vector<ThetaFactor> factors;
    for (int i = 1; i <= 3; ++i)
        factors.emplace_back(Monomial::symbol("z" + std::to_string(i)) * q(1),
                             Monomial::symbol("z" + std::to_string(i), Rational(-1)));
    IntMatrix b(3, {1, 1, 1, 2, -1, 0, 1, 1, -1});
    PreparedInput prep = prepare_input(factors, b);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(prep.input));
}
BENCHMARK(bm_decompose_det6);

void bm_verify_deg7(benchmark::State& state) {
    Corpus corpus = Corpus::load_directory(Corpus::default_directory());
    const Identity* id = corpus.find("deg7");
    Rational order(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(verify(*id, order));
}
BENCHMARK(bm_verify_deg7)->Arg(40)->Arg(80);

void bm_winquist_lattice(benchmark::State& state) {
    Corpus corpus = Corpus::load_directory(Corpus::default_directory());
    const Identity* id = corpus.find("winquist");
    for (auto _ : state) benchmark::DoNotOptimize(verify(*id, Rational(state.range(0))));
}
BENCHMARK(bm_winquist_lattice)->Arg(15)->Arg(25);

} // namespace

BENCHMARK_MAIN();
