// Serial reference loops against their OpenMP versions.
#include <benchmark/benchmark.h>

#include <numbers>

#include "fracsr/mc_solver.hpp"
#include "fracsr/spectral.hpp"

using namespace fracsr;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario scenario() {
    Scenario s;
    s.alpha = 2.0;
    s.beta = 0.5;
    s.domain = Interval{0.0, kPi};
    s.phi0 = Field(form::SineMode{1, 0.0, kPi});
    s.f = Field(Product{timeform::Exp{0.5}, form::GaussBump{Point(1.5), 0.3}});
    return s;
}

// arg 0: 0 = serial reference, otherwise the OpenMP worker count.
void BM_mc_u_post(benchmark::State& st) {
    const Scenario s = scenario();
    McConfig c;
    c.n_samples = 4000;
    c.exec = st.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::OpenMP;
    c.workers = st.range(0) == 0 ? 1 : static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(mc::estimate_u_post(s, 0.8, Point(1.2), c).mean);
    st.SetItemsProcessed(st.iterations() * c.n_samples);
}
BENCHMARK(BM_mc_u_post)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_spectral_grid(benchmark::State& st) {
    const Scenario s = scenario();
    SpectralConfig c = s.spectral;
    c.n_modes = 32;
    c.exec = st.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::OpenMP;
    std::vector<double> ts, xs;
    for (int i = 1; i <= 16; ++i) ts.push_back(i / 16.0);
    for (int j = 1; j <= 16; ++j) xs.push_back(j * kPi / 17.0);
    for (auto _ : st) benchmark::DoNotOptimize(spectral::solve_spectral(s, ts, xs, c).max_tail);
}
BENCHMARK(BM_spectral_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
