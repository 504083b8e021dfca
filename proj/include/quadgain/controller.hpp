#pragma once

#include <cmath>
#include <optional>

#include "quadgain/control_design.hpp"
#include "quadgain/matrix.hpp"
#include "quadgain/vehicle.hpp"

namespace quadgain {

struct Setpoint {
    Vec3 p_inertial_des{0.0, 0.0, 0.0};  // m
    double psi_des = 0.0;                // rad
};

struct TrackerConfig {
    double k1 = 1.0;     // position error -> speed error, 1/s
    double k2 = 1.0;     // yaw error -> yaw rate error, 1/s
    double v_sat = 1.0;  // linear speed error clamp, m/s
    double w_sat = 3.14; // yaw rate error clamp, rad/s
};

/// Error vector fed to U = -G e. Position and yaw slots are identically zero;
/// their errors are folded into the speed and yaw-rate slots instead.
struct ErrorState {
    StateVec e{};
    bool speed_saturated = false;  // any linear speed-error component clamped
    bool rate_saturated = false;   // yaw-rate error component clamped
};

/// Hover law U = -G X on the raw 12-dimensional state vector.
inline InputVec hover_input(const StateVec& x, const Mat& gain) {
    InputVec u{};
    for (int row = 0; row < 4; ++row) {
        double acc = 0.0;
        for (int col = 0; col < 12; ++col) acc += gain(row, col) * x[col];
        u[row] = -acc;
    }
    return u;
}

inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;  // (-pi, pi]
}

/// Tracking error vector: the inertial position error is rotated into the
/// body frame and folded into the speed slots through k1 (then clamped), the
/// wrapped yaw error into the yaw-rate slot through k2 (then clamped).
inline ErrorState tracking_error(const RigidState& s, const Setpoint& sp,
                                 const TrackerConfig& cfg) {
    const Vec3 p_err_inertial = {s.p_inertial[0] - sp.p_inertial_des[0],
                                 s.p_inertial[1] - sp.p_inertial_des[1],
                                 s.p_inertial[2] - sp.p_inertial_des[2]};
    const Vec3 p_err_body = rotate_to_body(s.euler, p_err_inertial);

    ErrorState out;
    for (int i = 0; i < 3; ++i) {
        double ve = s.v_body[i] + cfg.k1 * p_err_body[i];
        if (ve > cfg.v_sat) {
            ve = cfg.v_sat;
            out.speed_saturated = true;
        } else if (ve < -cfg.v_sat) {
            ve = -cfg.v_sat;
            out.speed_saturated = true;
        }
        out.e[sidx::vx + i] = ve;
    }

    out.e[sidx::wx] = s.omega_body[0];
    out.e[sidx::wy] = s.omega_body[1];
    double wze = s.omega_body[2] + cfg.k2 * wrap_angle(s.euler[2] - sp.psi_des);
    if (wze > cfg.w_sat) {
        wze = cfg.w_sat;
        out.rate_saturated = true;
    } else if (wze < -cfg.w_sat) {
        wze = -cfg.w_sat;
        out.rate_saturated = true;
    }
    out.e[sidx::wz] = wze;

    out.e[sidx::phi] = s.euler[0];
    out.e[sidx::theta] = s.euler[1];
    // Position and yaw slots stay zero.
    return out;
}

struct ControlOutput {
    InputVec u{};
    RotorSpeeds rotors;
    bool speed_saturated = false;
    bool rate_saturated = false;
    bool rotors_clamped = false;
};

/// One control update: hover mode feeds back the raw state vector, tracking
/// mode the engineered error vector; either way U = -G e goes through the
/// mixer. Setpoint == nullopt selects hover mode.
inline ControlOutput control_step(const RigidState& s,
                                  const std::optional<Setpoint>& sp, const Mat& gain,
                                  const TrackerConfig& cfg,
                                  const VehicleParams& params) {
    if (std::abs(s.euler[1]) >= kGimbalGuardRad) throw GimbalLockError(s.euler[1]);

    ControlOutput out;
    if (sp) {
        const ErrorState err = tracking_error(s, *sp, cfg);
        out.u = hover_input(err.e, gain);
        out.speed_saturated = err.speed_saturated;
        out.rate_saturated = err.rate_saturated;
    } else {
        out.u = hover_input(to_state_vector(s), gain);
    }
    const MixerResult mix = mixer(out.u, params);
    out.rotors = mix.rotors;
    out.rotors_clamped = mix.clamped;
    return out;
}

}  // namespace quadgain
