#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracsr::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached n-point rule; thread-safe. Nodes ascending.
const Rule& gauss_legendre(int n);

// Rule mapped to [a, b].
struct MappedRule {
    std::vector<double> x;
    std::vector<double> w;
};
MappedRule gauss_legendre_on(int n, double a, double b);

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

// Composite Gauss-Legendre: `panels` equal panels of an n-point rule.
template <class F>
double integrate_gl_composite(F&& f, double a, double b, int n, int panels) {
    double s = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) s += integrate_gl(f, a + p * w, a + (p + 1) * w, n);
    return s;
}

// Index-ordered pairwise summation; result independent of how the values were produced.
double pairwise_sum(std::span<const double> v);

}  // namespace fracsr::quad
