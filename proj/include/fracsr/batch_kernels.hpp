#pragma once

// Vectorized transforms from uniforms to variates. Compiled in their own translation unit
// with SIMD math enabled; everything else in the library uses scalar libm.

namespace fracsr::batch {

// out[i] = scale * S_i with S_i one-sided beta-stable from (u1[i], u2[i]) (Kanter).
void one_sided_stable(double beta, double scale, const double* u1, const double* u2, double* out, int n);

// out[i] = log S_i + log_scale.
void log_one_sided_stable(double beta, double log_scale, const double* u1, const double* u2, double* out, int n);

// Box-Muller: z0[i], z1[i] standard normals from (u1[i], u2[i]).
void box_muller(const double* u1, const double* u2, double* z0, double* z1, int n);

// out[i] = sqrt(2 exp(log_var_half[i])), the Gaussian scale for subordinated increments.
void sqrt_two_exp(const double* log_var_half, double* out, int n);

}  // namespace fracsr::batch
