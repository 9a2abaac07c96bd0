#pragma once

// Uniform 1-D mesh on [0,1]: difference operators with ghost-node Neumann
// closure, trapezoid quadrature, and norms.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace burgersim {

using Field = std::vector<double>;

struct Grid {
    int n;       // node count, >= 3
    double dx;   // spacing, 1/(n-1)

    explicit Grid(int nodes) : n(nodes), dx(1.0 / (nodes - 1)) {
        assert(nodes >= 3);
    }

    double x(int i) const { return i * dx; }

    Field make_field(double value = 0.0) const {
        return Field(static_cast<std::size_t>(n), value);
    }

    template <class F>
    Field sample(F&& fn) const {
        Field f(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = fn(x(i));
        return f;
    }
};

// ----- quadrature and norms -----

// Composite trapezoid: dx*(f0/2 + f1 + ... + f_{n-2} + f_{n-1}/2).
inline double trapezoid(const Grid& g, const Field& f) {
    assert(static_cast<int>(f.size()) == g.n);
    double s = 0.5 * (f.front() + f.back());
    for (int i = 1; i + 1 < g.n; ++i) s += f[static_cast<std::size_t>(i)];
    return s * g.dx;
}

inline double l2_norm(const Grid& g, const Field& f) {
    double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
    for (int i = 1; i + 1 < g.n; ++i) {
        const double v = f[static_cast<std::size_t>(i)];
        s += v * v;
    }
    return std::sqrt(s * g.dx);
}

inline double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

// ----- difference operators -----

// Central differences inside, second-order one-sided stencils at the ends.
inline Field first_derivative(const Grid& g, const Field& f) {
    const int n = g.n;
    Field d(static_cast<std::size_t>(n));
    const double inv2dx = 1.0 / (2.0 * g.dx);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
    for (int i = 1; i + 1 < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        d[u] = (f[u + 1] - f[u - 1]) * inv2dx;
    }
    const auto m = static_cast<std::size_t>(n - 1);
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) * inv2dx;
    return d;
}

// Boundary-value/derivative norm: sqrt(f(0)^2 + integral of f_x^2).
inline double h1_norm(const Grid& g, const Field& f) {
    const Field d = first_derivative(g, f);
    Field d2(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) d2[i] = d[i] * d[i];
    return std::sqrt(f[0] * f[0] + trapezoid(g, d2));
}

// 3-point Laplacian with flux (Neumann) boundary data g0 = w_x(0), g1 = w_x(1),
// closed with second-order ghost values f_{-1} = f_1 - 2*dx*g0 and
// f_n = f_{n-2} + 2*dx*g1.
inline Field neumann_laplacian(const Grid& g, const Field& f, double g0, double g1) {
    const int n = g.n;
    Field L(static_cast<std::size_t>(n));
    const double invdx2 = 1.0 / (g.dx * g.dx);
    L[0] = (2.0 * f[1] - 2.0 * f[0] - 2.0 * g.dx * g0) * invdx2;
    for (int i = 1; i + 1 < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        L[u] = (f[u + 1] - 2.0 * f[u] + f[u - 1]) * invdx2;
    }
    const auto m = static_cast<std::size_t>(n - 1);
    L[m] = (2.0 * f[m - 1] - 2.0 * f[m] + 2.0 * g.dx * g1) * invdx2;
    return L;
}

}  // namespace burgersim
