#include "fracsr/batch_kernels.hpp"

#include <math.h>

namespace fracsr::batch {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLogMax = 700.0;   // keeps exp finite; such a jump ends any path anyway
}

void log_one_sided_stable(double beta, double log_scale, const double* u1, const double* u2, double* out, int n) {
    const double c1 = (1.0 - beta) / beta;
    const double ib = 1.0 / beta;
#pragma omp simd
    for (int i = 0; i < n; ++i) {
        const double u = kPi * u1[i];
        const double e = -log(u2[i]);
        const double sb = sin(beta * u);
        const double su = sin(u);
        const double s1 = sin((1.0 - beta) * u);
        out[i] = log_scale + log(sb) - ib * log(su) + c1 * log(s1 / e);
    }
}

void one_sided_stable(double beta, double scale, const double* u1, const double* u2, double* out, int n) {
    const double c1 = (1.0 - beta) / beta;
    const double ib = 1.0 / beta;
    const double ls = log(scale);
#pragma omp simd
    for (int i = 0; i < n; ++i) {
        const double u = kPi * u1[i];
        const double e = -log(u2[i]);
        const double sb = sin(beta * u);
        const double su = sin(u);
        const double s1 = sin((1.0 - beta) * u);
        const double l = ls + log(sb) - ib * log(su) + c1 * log(s1 / e);
        out[i] = exp(l < kLogMax ? l : kLogMax);
    }
}

void box_muller(const double* u1, const double* u2, double* z0, double* z1, int n) {
#pragma omp simd
    for (int i = 0; i < n; ++i) {
        const double r = sqrt(-2.0 * log(u1[i]));
        const double a = 2.0 * kPi * u2[i];
        z0[i] = r * cos(a);
        z1[i] = r * sin(a);
    }
}

void sqrt_two_exp(const double* log_var_half, double* out, int n) {
#pragma omp simd
    for (int i = 0; i < n; ++i) {
        const double l = log_var_half[i];
        out[i] = sqrt(2.0 * exp(l < kLogMax ? l : kLogMax));
    }
}

}  // namespace fracsr::batch
