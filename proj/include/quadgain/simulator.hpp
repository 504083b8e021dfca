#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadgain/controller.hpp"
#include "quadgain/integrate.hpp"
#include "quadgain/rng.hpp"
#include "quadgain/vehicle.hpp"

namespace quadgain {

enum class DisturbanceMode { none, pulse, gaussian };

/// Disturbance signal description. Values are in speed units (m/s, rad/s) and
/// are sampled once per control interval, zero-order held.
struct DisturbanceSpec {
    DisturbanceMode mode = DisturbanceMode::none;
    // pulse: constant (dv, domega) on [t0, t1)
    double pulse_dv = 0.0;
    double pulse_domega = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    // gaussian: i.i.d. zero-mean draws per component per interval
    double std_v = 0.0;
    double std_w = 0.0;
    std::uint64_t seed = 0;
};

enum class SimMode { hover, track };

struct ScenarioConfig {
    SimMode mode = SimMode::hover;
    Setpoint setpoint;            // used in track mode
    double duration = 5.0;        // s
    double dt_physics = 0.001;    // s
    double dt_control = 0.01;     // s; integer multiple of dt_physics
    DisturbanceSpec disturbance;
    RigidState initial;
};

// Saturation flag bits logged per row.
inline constexpr int kFlagSpeedSat = 1;
inline constexpr int kFlagRateSat = 2;
inline constexpr int kFlagRotorClamp = 4;

struct SimRow {
    double t = 0.0;
    std::array<double, 12> state{};  // vx vy vz X Y Z wx wy wz phi theta psi
    InputVec u{};
    std::array<double, 4> rotors{};
    std::array<double, 6> dist{};    // d_vx d_vy d_vz d_wx d_wy d_wz
    int flags = 0;
};

struct SimLog {
    ScenarioConfig config;
    std::vector<SimRow> rows;
    bool aborted = false;
    std::string abort_reason;
};

/// Disturbance sample at time t. Gaussian mode consumes six normal draws in
/// the fixed order (vx, vy, vz, wx, wy, wz).
inline BodyDisturbance sample_disturbance(const DisturbanceSpec& spec, double t,
                                          Rng& rng) {
    BodyDisturbance d;
    switch (spec.mode) {
        case DisturbanceMode::none:
            break;
        case DisturbanceMode::pulse:
            if (t >= spec.t0 && t < spec.t1) {
                d.dv = {spec.pulse_dv, spec.pulse_dv, spec.pulse_dv};
                d.domega = {spec.pulse_domega, spec.pulse_domega, spec.pulse_domega};
            }
            break;
        case DisturbanceMode::gaussian:
            for (int i = 0; i < 3; ++i) d.dv[i] = spec.std_v * rng.normal();
            for (int i = 0; i < 3; ++i) d.domega[i] = spec.std_w * rng.normal();
            break;
    }
    return d;
}

namespace detail {

inline std::array<double, 12> pack_native(const RigidState& s) {
    return {s.v_body[0], s.v_body[1], s.v_body[2],
            s.p_inertial[0], s.p_inertial[1], s.p_inertial[2],
            s.omega_body[0], s.omega_body[1], s.omega_body[2],
            s.euler[0], s.euler[1], s.euler[2]};
}

inline RigidState unpack_native(const std::vector<double>& x) {
    RigidState s;
    s.v_body = {x[0], x[1], x[2]};
    s.p_inertial = {x[3], x[4], x[5]};
    s.omega_body = {x[6], x[7], x[8]};
    s.euler = {x[9], x[10], x[11]};
    return s;
}

inline bool all_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace detail

inline void validate(const ScenarioConfig& cfg) {
    if (!(cfg.duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (!(cfg.dt_physics > 0.0) || cfg.dt_physics > cfg.dt_control)
        throw std::invalid_argument("need 0 < dt_physics <= dt_control");
    const double ratio = cfg.dt_control / cfg.dt_physics;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw std::invalid_argument("dt_control must be an integer multiple of dt_physics");
    if (cfg.disturbance.mode == DisturbanceMode::pulse &&
        !(cfg.disturbance.t0 < cfg.disturbance.t1))
        throw std::invalid_argument("pulse window needs t0 < t1");
    if (cfg.disturbance.std_v < 0.0 || cfg.disturbance.std_w < 0.0)
        throw std::invalid_argument("disturbance std must be >= 0");
}

/// Closed-loop nonlinear simulation. Per control interval: sample the held
/// disturbance and fold its time-integral over the interval into the speed
/// states, compute one control update (rotor speeds zero-order held), then
/// integrate the plant at dt_physics. Gimbal proximity or a non-finite state
/// stops the run with a partial log and failure marker.
inline SimLog run_scenario(const ScenarioConfig& cfg, const Mat& gain,
                           const TrackerConfig& tracker, const VehicleParams& params) {
    validate(cfg);
    SimLog log;
    log.config = cfg;

    Rng rng(cfg.disturbance.seed);
    RigidState state = cfg.initial;
    const std::optional<Setpoint> sp =
        cfg.mode == SimMode::track ? std::optional<Setpoint>(cfg.setpoint) : std::nullopt;

    const long intervals = std::lround(cfg.duration / cfg.dt_control);
    const long substeps = std::lround(cfg.dt_control / cfg.dt_physics);
    log.rows.reserve(static_cast<std::size_t>(intervals) + 1);

    auto plant = [&](const RotorSpeeds& rotors) {
        return [&params, rotors](double /*t*/, const std::vector<double>& x) {
            const RigidState s = detail::unpack_native(x);
            const RigidState d = nonlinear_deriv(s, rotors, BodyDisturbance{}, params);
            const auto packed = detail::pack_native(d);
            return std::vector<double>(packed.begin(), packed.end());
        };
    };

    auto log_row = [&](double t, const BodyDisturbance& d, const ControlOutput& c) {
        SimRow row;
        row.t = t;
        row.state = detail::pack_native(state);
        row.u = c.u;
        row.rotors = c.rotors.w;
        row.dist = {d.dv[0], d.dv[1], d.dv[2], d.domega[0], d.domega[1], d.domega[2]};
        if (c.speed_saturated) row.flags |= kFlagSpeedSat;
        if (c.rate_saturated) row.flags |= kFlagRateSat;
        if (c.rotors_clamped) row.flags |= kFlagRotorClamp;
        log.rows.push_back(row);
    };

    for (long k = 0; k <= intervals; ++k) {
        const double t = static_cast<double>(k) * cfg.dt_control;
        BodyDisturbance d;  // terminal row records the state only
        if (k < intervals) {
            d = sample_disturbance(cfg.disturbance, t, rng);
            for (int i = 0; i < 3; ++i) {
                state.v_body[i] += d.dv[i] * cfg.dt_control;
                state.omega_body[i] += d.domega[i] * cfg.dt_control;
            }
        }

        ControlOutput control;
        try {
            control = control_step(state, sp, gain, tracker, params);
        } catch (const GimbalLockError& e) {
            log.aborted = true;
            log.abort_reason = e.what();
            break;
        }
        log_row(t, d, control);
        if (k == intervals) break;

        std::vector<double> x(12);
        {
            const auto packed = detail::pack_native(state);
            std::copy(packed.begin(), packed.end(), x.begin());
        }
        bool failed = false;
        for (long i = 0; i < substeps && !failed; ++i) {
            try {
                x = rk4_step(plant(control.rotors), x, t + i * cfg.dt_physics,
                             cfg.dt_physics);
            } catch (const GimbalLockError& e) {
                log.aborted = true;
                log.abort_reason = e.what();
                failed = true;
            }
            if (!failed && !detail::all_finite(x)) {
                log.aborted = true;
                log.abort_reason = "non-finite state at t = " + std::to_string(t);
                failed = true;
            }
        }
        if (failed) break;
        state = detail::unpack_native(x);
    }
    return log;
}

struct Summary {
    std::array<double, 12> max_abs_state{};  // per logged channel
    double t_last_disturbance = 0.0;
    double settling_time = 0.0;   // pose channels: last time outside 2% of peak
    double final_pos_err = 0.0;   // |position - setpoint| at the last row, m
    double final_yaw_err = 0.0;   // |wrapped yaw error| at the last row, rad
    double rotor_sat_fraction = 0.0;
    bool aborted = false;
};

/// Per-channel peak deviations, settling against a 2%-of-peak band after the
/// last nonzero disturbance, terminal setpoint error, and rotor-clamp duty.
inline Summary summarize(const SimLog& log) {
    if (log.rows.empty()) throw std::invalid_argument("summarize: empty log");
    Summary s;
    s.aborted = log.aborted;

    for (const SimRow& row : log.rows)
        for (int c = 0; c < 12; ++c)
            s.max_abs_state[c] = std::max(s.max_abs_state[c], std::abs(row.state[c]));

    for (const SimRow& row : log.rows)
        for (double d : row.dist)
            if (d != 0.0) s.t_last_disturbance = row.t;

    // Pose channels X..Z, phi..psi; settling = last sample outside the band.
    s.settling_time = s.t_last_disturbance;
    for (int c : {3, 4, 5, 9, 10, 11}) {
        const double band = 0.02 * s.max_abs_state[c];
        if (band == 0.0) continue;
        for (const SimRow& row : log.rows)
            if (std::abs(row.state[c]) > band)
                s.settling_time = std::max(s.settling_time, row.t);
    }

    const SimRow& last = log.rows.back();
    const Setpoint sp = log.config.mode == SimMode::track ? log.config.setpoint : Setpoint{};
    const double dx = last.state[3] - sp.p_inertial_des[0];
    const double dy = last.state[4] - sp.p_inertial_des[1];
    const double dz = last.state[5] - sp.p_inertial_des[2];
    s.final_pos_err = std::sqrt(dx * dx + dy * dy + dz * dz);
    s.final_yaw_err = std::abs(wrap_angle(last.state[11] - sp.psi_des));

    std::size_t clamped = 0;
    for (const SimRow& row : log.rows)
        if (row.flags & kFlagRotorClamp) ++clamped;
    s.rotor_sat_fraction = static_cast<double>(clamped) / log.rows.size();
    return s;
}

inline constexpr const char* kCsvHeader =
    "t,vx,vy,vz,X,Y,Z,wx,wy,wz,phi,theta,psi,u1,u2,u3,u4,"
    "wm1,wm2,wm3,wm4,d_vx,d_vy,d_vz,d_wx,d_wy,d_wz,sat_flags";

/// CSV export, one row per control interval, 9 significant digits.
inline void write_csv(std::ostream& out, const SimLog& log) {
    out << kCsvHeader << "\n";
    out.precision(9);
    for (const SimRow& row : log.rows) {
        out << row.t;
        for (double v : row.state) out << ',' << v;
        for (double v : row.u) out << ',' << v;
        for (double v : row.rotors) out << ',' << v;
        for (double v : row.dist) out << ',' << v;
        out << ',' << row.flags << "\n";
    }
}

inline void write_csv_file(const std::string& path, const SimLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
    write_csv(out, log);
}

/// Parses a CSV produced by write_csv back into rows (values only).
inline std::vector<SimRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("CSV: unexpected header");
    std::vector<SimRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 27> vals{};
        int flags = 0;
        std::istringstream ls(line);
        std::string field;
        for (int i = 0; i < 27; ++i) {
            if (!std::getline(ls, field, ','))
                throw std::runtime_error("CSV: short row");
            vals[i] = std::stod(field);
        }
        if (!std::getline(ls, field)) throw std::runtime_error("CSV: missing flags");
        flags = std::stoi(field);

        SimRow row;
        row.t = vals[0];
        for (int i = 0; i < 12; ++i) row.state[i] = vals[1 + i];
        for (int i = 0; i < 4; ++i) row.u[i] = vals[13 + i];
        for (int i = 0; i < 4; ++i) row.rotors[i] = vals[17 + i];
        for (int i = 0; i < 6; ++i) row.dist[i] = vals[21 + i];
        row.flags = flags;
        rows.push_back(row);
    }
    return rows;
}

/// Flat key-value summary export.
inline void write_summary(std::ostream& out, const Summary& s) {
    static constexpr const char* names[12] = {"vx", "vy", "vz", "X",   "Y",     "Z",
                                              "wx", "wy", "wz", "phi", "theta", "psi"};
    out.precision(9);
    for (int c = 0; c < 12; ++c) out << "max_abs_" << names[c] << " " << s.max_abs_state[c] << "\n";
    out << "t_last_disturbance " << s.t_last_disturbance << "\n";
    out << "settling_time " << s.settling_time << "\n";
    out << "final_pos_err " << s.final_pos_err << "\n";
    out << "final_yaw_err " << s.final_yaw_err << "\n";
    out << "rotor_sat_fraction " << s.rotor_sat_fraction << "\n";
    out << "aborted " << (s.aborted ? 1 : 0) << "\n";
}

}  // namespace quadgain
