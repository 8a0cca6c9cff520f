#pragma once

#include <cstdint>

namespace fracsr {

struct SpecFunConfig {
    double series_cutoff_radius = 5.0;
    int asymptotic_terms = 20;
    double abs_tol = 1e-12;
    int quad_nodes = 201;
};

struct PathConfig {
    double h = 1e-3;                  // operational-time step
    std::int64_t max_steps = 10'000'000;
    bool record_trajectory = false;
};

enum class McMode { PathMode, MarginalMode };

// Serial is the reference loop; OpenMP must reproduce it bit-for-bit.
enum class ExecPolicy { Serial, OpenMP };

struct McConfig {
    std::int64_t n_samples = 100'000;
    std::uint64_t seed = 20240531;
    PathConfig path;
    McMode mode = McMode::PathMode;
    int workers = 1;
    ExecPolicy exec = ExecPolicy::OpenMP;
};

struct SpectralConfig {
    int n_modes = 64;
    int time_quad_nodes = 256;
    int space_quad_nodes = 512;
    double tail_tol = 1e-10;
    ExecPolicy exec = ExecPolicy::OpenMP;   // over grid times; not part of the scenario JSON
};

}  // namespace fracsr
