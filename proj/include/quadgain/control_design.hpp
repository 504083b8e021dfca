#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadgain/matrix.hpp"
#include "quadgain/polynomial.hpp"
#include "quadgain/rng.hpp"
#include "quadgain/vehicle.hpp"

namespace quadgain {

/// The twelve scalar gains g1..g12 (stored g[0]..g[11]).
using GainVector = std::array<double, 12>;

/// Published reference gain set; reproduces kReferencePoles at g = 9.81.
inline constexpr GainVector kReferenceGains = {
    32.8, 608.0, 394.5, 862.9, 47.1, 657.9,
    -397.8, -1124.2, 39.4, 552.7, 30.1, 623.4};

/// Closed-loop poles that kReferenceGains was selected for (2-decimal values).
inline const std::vector<ComplexRoot> kReferencePoles = {
    {-28.32, 0.0}, {-20.36, 0.0}, {-6.47, 0.0},  {-6.28, 0.0},
    {-16.40, 18.41}, {-16.40, -18.41}, {-15.05, 19.92}, {-15.05, -19.92},
    {-6.29, 6.65},   {-6.29, -6.65},   {-6.25, 2.92},   {-6.25, -2.92}};

/// Target band for closed-loop pole real parts.
struct PoleSpec {
    double re_min = -30.0;
    double re_max = -6.0;
};

struct SecondOrderMetrics {
    double t_s;     // 2% settling time, s
    double t_r;     // 10-90% rise time, s
    double os_pct;  // percent overshoot
};

/// Controllability test matrix [B | AB | ... | A^(n-1)B].
inline Mat controllability_matrix(const Mat& a, const Mat& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw std::invalid_argument("controllability_matrix: incompatible dimensions");
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    Mat q(n, n * m);
    Mat block = b;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) block = mat_mul(a, block);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c) q(r, k * m + c) = block(r, c);
    }
    return q;
}

/// Embeds g1..g12 into the structured 4x12 gain matrix: u1 from (vz, z),
/// u2 from (vy, y, wx, phi), u3 from (vx, x, wy, theta), u4 from (wz, psi).
inline Mat assemble_gain_matrix(const GainVector& g) {
    Mat m(4, 12);
    m(0, sidx::vz) = g[0];
    m(0, sidx::z) = g[1];
    m(1, sidx::vy) = g[2];
    m(1, sidx::y) = g[3];
    m(1, sidx::wx) = g[4];
    m(1, sidx::phi) = g[5];
    m(2, sidx::vx) = g[6];
    m(2, sidx::x) = g[7];
    m(2, sidx::wy) = g[8];
    m(2, sidx::theta) = g[9];
    m(3, sidx::wz) = g[10];
    m(3, sidx::psi) = g[11];
    return m;
}

/// Characteristic factors of A - BG under the structured gain sparsity. The
/// closed loop decouples exactly into altitude and yaw quadratics plus roll
/// and pitch quartics.
struct ClosedLoopFactors {
    Poly altitude;  // s^2 + g1 s + g2
    Poly yaw;       // s^2 + g11 s + g12
    Poly roll;      // s^4 + g5 s^3 + g6 s^2 + g*g3 s + g*g4
    Poly pitch;     // s^4 + g9 s^3 + g10 s^2 - g*g7 s - g*g8
};

inline ClosedLoopFactors closed_loop_factors(const GainVector& g, double grav) {
    ClosedLoopFactors f;
    f.altitude = Poly{{g[1], g[0], 1.0}};
    f.yaw = Poly{{g[11], g[10], 1.0}};
    f.roll = Poly{{grav * g[3], grav * g[2], g[5], g[4], 1.0}};
    f.pitch = Poly{{-grav * g[7], -grav * g[6], g[9], g[8], 1.0}};
    return f;
}

/// All 12 closed-loop poles (union of the four factors' roots).
inline std::vector<ComplexRoot> closed_loop_poles(const GainVector& g, double grav) {
    const ClosedLoopFactors f = closed_loop_factors(g, grav);
    std::vector<ComplexRoot> poles;
    poles.reserve(12);
    for (const Poly* p : {&f.altitude, &f.yaw, &f.roll, &f.pitch})
        for (const ComplexRoot& r : poly_roots(*p)) poles.push_back(r);
    return poles;
}

/// Dominant-pole design formulas: t_s = 4/(zeta wn), t_r = 1.8/wn,
/// %OS = 100 exp(-zeta pi / sqrt(1 - zeta^2)) (0 at critical damping and up).
inline SecondOrderMetrics second_order_metrics(double zeta, double omega_n) {
    if (!(zeta > 0.0) || !(omega_n > 0.0))
        throw std::invalid_argument("second_order_metrics: zeta and omega_n must be > 0");
    SecondOrderMetrics m;
    m.t_s = 4.0 / (zeta * omega_n);
    m.t_r = 1.8 / omega_n;
    m.os_pct = zeta >= 1.0
                   ? 0.0
                   : 100.0 * std::exp(-zeta * M_PI / std::sqrt(1.0 - zeta * zeta));
    return m;
}

/// Zero iff every pole's real part lies inside [re_min, re_max]; otherwise
/// the sum of squared distances of real parts to the nearest band edge.
inline double pole_cost(const std::vector<ComplexRoot>& poles, const PoleSpec& spec) {
    double cost = 0.0;
    for (const ComplexRoot& p : poles) {
        const double re = p.real();
        if (re < spec.re_min) {
            const double d = spec.re_min - re;
            cost += d * d;
        } else if (re > spec.re_max) {
            const double d = re - spec.re_max;
            cost += d * d;
        }
    }
    return cost;
}

/// Per-gain search intervals. Damping-like gains are kept moderate, stiffness
/// gains larger; g7/g8 must be negative for the pitch factor to be stable.
struct GainBounds {
    std::array<double, 12> lo = {1.0,   100.0, 100.0, 100.0, 1.0,   100.0,
                                 -2000.0, -2000.0, 1.0, 100.0, 1.0, 100.0};
    std::array<double, 12> hi = {100.0, 2000.0, 2000.0, 2000.0, 100.0, 2000.0,
                                 -1.0,  -1.0,   100.0, 2000.0, 100.0, 2000.0};
};

struct AnnealConfig {
    std::uint64_t seed = 0;      // must be set explicitly per run
    double initial_temp = 10.0;
    double cooling_ratio = 0.95;
    int steps_per_temp = 200;
    double min_temp = 1e-4;
    double step_scale = 0.1;     // fraction of each bound width at T = T0
    GainBounds bounds;
};

struct AnnealResult {
    GainVector gains{};
    double cost = 0.0;
    long iterations = 0;
};

/// Simulated-annealing search for gains whose closed-loop poles land inside
/// the band. Single-gain Gaussian proposals with temperature-proportional
/// width, Metropolis acceptance, geometric cooling; stops at min_temp or on
/// reaching zero cost. Deterministic for a given config. Returns best-ever.
inline AnnealResult anneal_gains(const AnnealConfig& cfg, const PoleSpec& spec,
                                 double grav) {
    if (!(cfg.initial_temp > cfg.min_temp) || !(cfg.min_temp > 0.0))
        throw std::invalid_argument("anneal_gains: need initial_temp > min_temp > 0");
    if (!(cfg.cooling_ratio > 0.0 && cfg.cooling_ratio < 1.0))
        throw std::invalid_argument("anneal_gains: cooling_ratio must be in (0,1)");

    Rng rng(cfg.seed);
    auto cost_of = [&](const GainVector& g) {
        return pole_cost(closed_loop_poles(g, grav), spec);
    };

    GainVector x;
    for (int i = 0; i < 12; ++i)
        x[i] = rng.uniform(cfg.bounds.lo[i], cfg.bounds.hi[i]);

    AnnealResult best;
    best.gains = x;
    best.cost = cost_of(x);
    double cur_cost = best.cost;
    if (best.cost == 0.0) return best;

    for (double temp = cfg.initial_temp; temp >= cfg.min_temp;
         temp *= cfg.cooling_ratio) {
        const double temp_factor = temp / cfg.initial_temp;
        for (int step = 0; step < cfg.steps_per_temp; ++step) {
            const int j = static_cast<int>(rng.uniform_index(12));
            const double width = cfg.bounds.hi[j] - cfg.bounds.lo[j];
            GainVector cand = x;
            cand[j] += rng.normal() * cfg.step_scale * width * temp_factor;
            cand[j] = std::clamp(cand[j], cfg.bounds.lo[j], cfg.bounds.hi[j]);

            const double cand_cost = cost_of(cand);
            ++best.iterations;
            const double delta = cand_cost - cur_cost;
            if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temp)) {
                x = cand;
                cur_cost = cand_cost;
                if (cur_cost < best.cost) {  // ties keep the earlier candidate
                    best.cost = cur_cost;
                    best.gains = x;
                }
            }
            if (best.cost == 0.0) return best;
        }
    }
    return best;
}

/// Gain file format: 12 lines, one value per line, g1 first. 17 significant
/// digits round-trip doubles exactly.
inline void save_gains(std::ostream& out, const GainVector& g) {
    out.precision(17);
    for (double v : g) out << v << "\n";
}

inline void save_gains_file(const std::string& path, const GainVector& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write gain file '" + path + "'");
    save_gains(out, g);
}

inline GainVector load_gains(std::istream& in) {
    GainVector g{};
    for (int i = 0; i < 12; ++i)
        if (!(in >> g[i]))
            throw std::runtime_error("gain file: expected 12 numeric lines, got " +
                                     std::to_string(i));
    return g;
}

inline GainVector load_gains_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gain file '" + path + "'");
    return load_gains(in);
}

}  // namespace quadgain
