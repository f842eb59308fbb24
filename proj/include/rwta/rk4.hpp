#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rwta {

// Scratch buffers for one classical Runge-Kutta step.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;

    explicit Rk4Workspace(std::size_t n = 0) { resize(n); }

    void resize(std::size_t n) {
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        k4.resize(n);
        tmp.resize(n);
    }
};

// Advances y in place by one step of size dt. `f(t, y, dydt)` evaluates
// the right-hand side; anything it reads besides (t, y) stays fixed for the
// four stages.
template <class System>
void rk4_step(System& f, std::span<double> y, double t, double dt, Rk4Workspace& ws) {
    const std::size_t n = y.size();
    if (ws.k1.size() != n) ws.resize(n);
    const double half = 0.5 * dt;

    f(t, std::span<const double>(y), std::span<double>(ws.k1));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + half * ws.k1[i];
    f(t + half, std::span<const double>(ws.tmp), std::span<double>(ws.k2));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + half * ws.k2[i];
    f(t + half, std::span<const double>(ws.tmp), std::span<double>(ws.k3));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + dt * ws.k3[i];
    f(t + dt, std::span<const double>(ws.tmp), std::span<double>(ws.k4));

    const double sixth = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += sixth * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
}

}  // namespace rwta
