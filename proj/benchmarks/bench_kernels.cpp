#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "vblob/blob_model.hpp"
#include "vblob/dmm.hpp"
#include "vblob/integrators.hpp"
#include "vblob/specfun.hpp"

namespace {

void BM_E1(benchmark::State& st) {
    std::vector<double> xs;
    for (int k = 0; k < 1024; ++k) xs.push_back(std::exp(-27.6 + 31.1 * k / 1023.0));
    for (auto _ : st)
        for (double x : xs) benchmark::DoNotOptimize(vblob::exp_integral_e1(x));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_E1);

void BM_CTau(benchmark::State& st) {
    const auto m = vblob::order_from_int(static_cast<int>(st.range(0)));
    double acc = 0.0;
    for (auto _ : st) {
        for (int k = 1; k <= 256; ++k) acc += vblob::c_tau(m, 0.05 * k, 0.05 * k * 1.01);
        benchmark::DoNotOptimize(acc);
    }
    st.SetItemsProcessed(st.iterations() * 256);
}
BENCHMARK(BM_CTau)->Arg(2)->Arg(4)->Arg(6);

void BM_Rhs(benchmark::State& st) {
    const auto g = vblob::init_grid(static_cast<int>(st.range(0)), 3, 0.75, vblob::Order::fourth, false);
    for (auto _ : st) benchmark::DoNotOptimize(vblob::rhs(g.system, g.state));
    const auto n = static_cast<long>(g.system.size());
    st.SetItemsProcessed(st.iterations() * n * (n - 1) / 2);
}
BENCHMARK(BM_Rhs)->Arg(10)->Arg(20)->Arg(40);

template <vblob::MethodKind K>
void BM_Step(benchmark::State& st) {
    const auto g = vblob::init_grid(static_cast<int>(st.range(0)), 3, 0.75, vblob::Order::fourth, false);
    const auto method = vblob::Method::make(K);
    for (auto _ : st) benchmark::DoNotOptimize(vblob::step(g.system, g.state, 1.0, method));
}
BENCHMARK(BM_Step<vblob::MethodKind::dmm>)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<vblob::MethodKind::imm>)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<vblob::MethodKind::rm4>)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
