#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace quadgain {

/// One classical 4th-order Runge-Kutta step. `deriv(t, x)` must return a
/// vector of the same dimension as `x`. Non-finite derivatives propagate into
/// the result; callers detect divergence on the returned state.
template <class Deriv>
std::vector<double> rk4_step(Deriv&& deriv, const std::vector<double>& state,
                             double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
    const std::size_t n = state.size();

    auto axpy = [n](const std::vector<double>& x, double a,
                    const std::vector<double>& d) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * d[i];
        return y;
    };

    const std::vector<double> k1 = deriv(t, state);
    const std::vector<double> k2 = deriv(t + 0.5 * dt, axpy(state, 0.5 * dt, k1));
    const std::vector<double> k3 = deriv(t + 0.5 * dt, axpy(state, 0.5 * dt, k2));
    const std::vector<double> k4 = deriv(t + dt, axpy(state, dt, k3));

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace quadgain
