#include "laxcheck/checks.hpp"

#include <benchmark/benchmark.h>

using namespace laxcheck;

namespace {

const EquivalencePackage& jacgr() {
  static EquivalencePackage p = builtin_package("jac-gr");
  return p;
}

void BM_gmul_theta_square(benchmark::State& state) {
  const auto& p = jacgr();
  const Context& c = *p.coord->t1->ctx;
  Expr theta1 = p.coord->t1->thetaC(1);
  for (auto _ : state) benchmark::DoNotOptimize(gmul(c, theta1, theta1));
}

void BM_is_zero_radical_identity(benchmark::State& state) {
  const auto& p = jacgr();
  const Context& c = *p.coord->t1->ctx;
  auto at = [&](const char* s) { return Expr::atom(c, c.atomByName(s)); };
  auto pw = [&](const char* s, int e) { return Expr::atomPow(c, c.atomByName(s), e); };
  // sqrt(E/T) - 1/sqrt(g) - (2 g^{3/2}/Omega) EL_g
  Expr e = sub(sub(gmul(c, at("sqrtE"), gmul(c, at("sqrtT"), pw("T", -1))),
                   gmul(c, at("sqrtg"), pw("g", -1))),
               scale(gmul(c, gmul(c, at("g"), at("sqrtg")), gmul(c, pw("Omega", -1), pw("EL_g", 1))), 2));
  for (auto _ : state) benchmark::DoNotOptimize(is_zero(c, e));
}

void BM_lie_derivative_varpi(benchmark::State& state) {
  const auto& p = jacgr();
  const Context& c = *p.coord->t1->ctx;
  Expr w1 = vertical_delta(c, p.coord->t1->thetaC(1));
  for (auto _ : state) benchmark::DoNotOptimize(lie_derivative(c, p.coord->t1->Q, w1));
}

void BM_psi_transform_theta0(benchmark::State& state) {
  const auto& p = jacgr();
  const Context& c2 = *p.coord->t2->ctx;
  Expr theta0 = p.coord->t2->thetaC(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_morphism(c2, p.coord->psiStar, theta0));
}

void BM_check_lax_gr1d(benchmark::State& state) {
  Theory t = builtin_theory("gr1d");
  for (auto _ : state) benchmark::DoNotOptimize(check_lax_axioms(t));
}

void BM_kernel_jacobi(benchmark::State& state) {
  Theory t = builtin_theory("jacobi");
  for (auto _ : state) benchmark::DoNotOptimize(preboundary_kernel(t));
}

BENCHMARK(BM_gmul_theta_square);
BENCHMARK(BM_is_zero_radical_identity);
BENCHMARK(BM_lie_derivative_varpi);
BENCHMARK(BM_psi_transform_theta0);
BENCHMARK(BM_check_lax_gr1d);
BENCHMARK(BM_kernel_jacobi);

} // namespace

BENCHMARK_MAIN();
