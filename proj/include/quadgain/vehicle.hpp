#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "quadgain/matrix.hpp"

namespace quadgain {

using Vec3 = std::array<double, 3>;
using StateVec = std::array<double, 12>;
using InputVec = std::array<double, 4>;

/// Indices into the 12-dimensional controller state vector
/// (vx, vy, vz, x, y, z, wx, wy, wz, phi, theta, psi).
namespace sidx {
inline constexpr int vx = 0, vy = 1, vz = 2;
inline constexpr int x = 3, y = 4, z = 5;
inline constexpr int wx = 6, wy = 7, wz = 8;
inline constexpr int phi = 9, theta = 10, psi = 11;
}  // namespace sidx

/// Raised when the pitch angle approaches the Euler-kinematics singularity.
/// The linear controller is invalid there; simulations abort with this.
class GimbalLockError : public std::runtime_error {
public:
    explicit GimbalLockError(double theta)
        : std::runtime_error("pitch angle " + std::to_string(theta) +
                             " rad is within 5 deg of gimbal lock") {}
};

inline constexpr double kGimbalGuardRad = 85.0 * M_PI / 180.0;

/// Physical constants of the vehicle. NED convention: z points down, so
/// gravity is +g along z and rotor thrust acts along -z.
struct VehicleParams {
    double L = 0.27;           // half distance between opposite rotors, m
    double m = 1.4;            // mass, kg
    double k = 11e-6;          // rotor speed^2 -> thrust, N s^2
    double b = 1.1e-6;         // rotor speed^2 -> drag torque, N m s^2
    double Ix = 8.1e-3;        // roll inertia, kg m^2
    double Iy = 8.1e-3;        // pitch inertia, kg m^2
    double Iz = 14.2e-3;       // yaw inertia, kg m^2
    double omega_max = 637.75; // motor speed limit, rad/s
    double g = 9.81;           // gravitational acceleration, m/s^2
};

/// Rotor speed at which four equal rotors cancel gravity.
inline double hover_speed(const VehicleParams& p) {
    return std::sqrt(p.g * p.m / (4.0 * p.k));
}

/// Throws std::invalid_argument when a parameter is non-physical or the
/// vehicle cannot hover inside the motor speed limit.
inline void validate(const VehicleParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(p.L, "L");
    positive(p.m, "m");
    positive(p.k, "k");
    positive(p.b, "b");
    positive(p.Ix, "Ix");
    positive(p.Iy, "Iy");
    positive(p.Iz, "Iz");
    positive(p.omega_max, "omega_max");
    positive(p.g, "g");
    if (hover_speed(p) > p.omega_max)
        throw std::invalid_argument(
            "hover infeasible: sqrt(g*m/(4k)) = " + std::to_string(hover_speed(p)) +
            " rad/s exceeds omega_max = " + std::to_string(p.omega_max));
}

namespace detail {

inline void apply_param_kv(VehicleParams& p, const std::string& key, double value) {
    if (key == "L") p.L = value;
    else if (key == "m") p.m = value;
    else if (key == "k") p.k = value;
    else if (key == "b") p.b = value;
    else if (key == "Ix") p.Ix = value;
    else if (key == "Iy") p.Iy = value;
    else if (key == "Iz") p.Iz = value;
    else if (key == "omega_max") p.omega_max = value;
    else if (key == "g") p.g = value;
    else throw std::invalid_argument("unknown vehicle parameter '" + key + "'");
}

}  // namespace detail

/// Parses a flat key-value stream ("key value" or "key=value", one per line,
/// '#' comments) on top of the supplied defaults. Does not validate.
inline VehicleParams load_params(std::istream& in,
                                 VehicleParams defaults = VehicleParams{}) {
    VehicleParams p = defaults;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& ch : line)
            if (ch == '=') ch = ' ';
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        double value;
        if (!(ls >> value))
            throw std::invalid_argument("params line " + std::to_string(lineno) +
                                        ": expected 'key value'");
        detail::apply_param_kv(p, key, value);
    }
    return p;
}

inline VehicleParams load_params_file(const std::string& path,
                                      VehicleParams defaults = VehicleParams{}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file '" + path + "'");
    return load_params(in, defaults);
}

/// Vehicle state: body-axis linear velocity, inertial NED position, body
/// angular velocity, and Z-Y-X Euler angles.
struct RigidState {
    Vec3 v_body{0.0, 0.0, 0.0};      // m/s
    Vec3 p_inertial{0.0, 0.0, 0.0};  // m
    Vec3 omega_body{0.0, 0.0, 0.0};  // rad/s
    Vec3 euler{0.0, 0.0, 0.0};       // roll, pitch, yaw, rad
};

struct RotorSpeeds {
    std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};  // rad/s, rotors M1..M4
};

/// Disturbance sample. In the default speed-offset mode the simulator applies
/// (dv, domega) to the speed states; passed directly to nonlinear_deriv they
/// act as specific force (m/s^2) and angular acceleration (rad/s^2) instead.
struct BodyDisturbance {
    Vec3 dv{0.0, 0.0, 0.0};
    Vec3 domega{0.0, 0.0, 0.0};
};

/// Z-Y-X rotation taking inertial coordinates into the body frame.
inline Mat rotation_inertial_to_body(const Vec3& euler) {
    const double cphi = std::cos(euler[0]), sphi = std::sin(euler[0]);
    const double cth = std::cos(euler[1]), sth = std::sin(euler[1]);
    const double cpsi = std::cos(euler[2]), spsi = std::sin(euler[2]);
    return Mat(3, 3,
               {cth * cpsi, cth * spsi, -sth,
                sphi * sth * cpsi - cphi * spsi, sphi * sth * spsi + cphi * cpsi, sphi * cth,
                cphi * sth * cpsi + sphi * spsi, cphi * sth * spsi - sphi * cpsi, cphi * cth});
}

/// Rotates an inertial-frame vector into the body frame.
inline Vec3 rotate_to_body(const Vec3& euler, const Vec3& v) {
    const Mat r = rotation_inertial_to_body(euler);
    return {r(0, 0) * v[0] + r(0, 1) * v[1] + r(0, 2) * v[2],
            r(1, 0) * v[0] + r(1, 1) * v[1] + r(1, 2) * v[2],
            r(2, 0) * v[0] + r(2, 1) * v[1] + r(2, 2) * v[2]};
}

/// Z-Y-X Euler angle rates from body angular velocity.
inline Vec3 euler_rates(const Vec3& euler, const Vec3& omega_body) {
    if (std::abs(euler[1]) >= kGimbalGuardRad) throw GimbalLockError(euler[1]);
    const double cphi = std::cos(euler[0]), sphi = std::sin(euler[0]);
    const double cth = std::cos(euler[1]), tth = std::tan(euler[1]);
    const double cross = omega_body[1] * sphi + omega_body[2] * cphi;
    return {omega_body[0] + tth * cross,
            omega_body[1] * cphi - omega_body[2] * sphi,
            cross / cth};
}

/// Rotor-speed aggregates: w1 total thrust term, w2/w3 roll/pitch moment
/// terms, w4 yaw drag term.
inline std::array<double, 4> rotor_aggregates(const RotorSpeeds& r) {
    const double s1 = r.w[0] * r.w[0], s2 = r.w[1] * r.w[1];
    const double s3 = r.w[2] * r.w[2], s4 = r.w[3] * r.w[3];
    return {s1 + s2 + s3 + s4, s2 - s4, s1 - s3, s1 - s2 + s3 - s4};
}

/// Time derivative of RigidState under the nonlinear rigid-body model.
/// Thrust convention: vdot_z = g cos(phi) cos(theta) - w1 k/m, so hover sits
/// at w1 = g m / k. `dist` enters as force/torque per unit mass/inertia and
/// is zero in the default speed-offset disturbance mode.
inline RigidState nonlinear_deriv(const RigidState& s, const RotorSpeeds& rotors,
                                  const BodyDisturbance& dist,
                                  const VehicleParams& p) {
    const auto w = rotor_aggregates(rotors);
    const double cphi = std::cos(s.euler[0]), sphi = std::sin(s.euler[0]);
    const double cth = std::cos(s.euler[1]), sth = std::sin(s.euler[1]);

    RigidState d;
    d.v_body = {-p.g * sth + dist.dv[0],
                p.g * sphi * cth + dist.dv[1],
                p.g * cphi * cth - w[0] * (p.k / p.m) + dist.dv[2]};
    d.omega_body = {-w[1] * (p.k * p.L / p.Ix) + dist.domega[0],
                    -w[2] * (p.k * p.L / p.Iy) + dist.domega[1],
                    w[3] * (p.b * p.L / p.Iz) + dist.domega[2]};

    // Body -> inertial is the transpose of the inertial -> body map.
    const Mat r = rotation_inertial_to_body(s.euler);
    d.p_inertial = {r(0, 0) * s.v_body[0] + r(1, 0) * s.v_body[1] + r(2, 0) * s.v_body[2],
                    r(0, 1) * s.v_body[0] + r(1, 1) * s.v_body[1] + r(2, 1) * s.v_body[2],
                    r(0, 2) * s.v_body[0] + r(1, 2) * s.v_body[1] + r(2, 2) * s.v_body[2]};
    d.euler = euler_rates(s.euler, s.omega_body);
    return d;
}

/// Small-angle linear model xdot = A x + B u around hover. A carries only the
/// gravity tilt couplings and the integrator chains; B routes u1..u4 to
/// vdot_z and the angular accelerations. No other vehicle parameter appears.
inline std::pair<Mat, Mat> linearized_ab(const VehicleParams& p) {
    Mat a(12, 12);
    a(sidx::vx, sidx::theta) = -p.g;
    a(sidx::vy, sidx::phi) = p.g;
    a(sidx::x, sidx::vx) = 1.0;
    a(sidx::y, sidx::vy) = 1.0;
    a(sidx::z, sidx::vz) = 1.0;
    a(sidx::phi, sidx::wx) = 1.0;
    a(sidx::theta, sidx::wy) = 1.0;
    a(sidx::psi, sidx::wz) = 1.0;

    Mat b(12, 4);
    b(sidx::vz, 0) = 1.0;
    b(sidx::wx, 1) = 1.0;
    b(sidx::wy, 2) = 1.0;
    b(sidx::wz, 3) = 1.0;
    return {a, b};
}

struct MixerResult {
    RotorSpeeds rotors;
    bool clamped = false;  // true when any squared speed left [0, omega_max^2]
};

/// Maps abstract inputs (u1..u4) to the four rotor speeds. Inverts the input
/// substitutions with u1 = g - w1 k/m, solves the aggregate relations for the
/// squared speeds, and clamps each into [0, omega_max^2] before the root.
inline MixerResult mixer(const InputVec& u, const VehicleParams& p) {
    const double w1 = (p.g - u[0]) * p.m / p.k;
    const double w2 = -u[1] * p.Ix / (p.k * p.L);
    const double w3 = -u[2] * p.Iy / (p.k * p.L);
    const double w4 = u[3] * p.Iz / (p.b * p.L);

    const std::array<double, 4> sq = {0.25 * (w1 + 2.0 * w3 + w4),
                                      0.25 * (w1 + 2.0 * w2 - w4),
                                      0.25 * (w1 - 2.0 * w3 + w4),
                                      0.25 * (w1 - 2.0 * w2 - w4)};
    MixerResult out;
    const double max_sq = p.omega_max * p.omega_max;
    for (int i = 0; i < 4; ++i) {
        double v = sq[i];
        if (v < 0.0) {
            v = 0.0;
            out.clamped = true;
        } else if (v > max_sq) {
            v = max_sq;
            out.clamped = true;
        }
        out.rotors.w[i] = std::sqrt(v);
    }
    return out;
}

/// Controller-facing state vector: positions are the inertial displacement
/// rotated into the body frame, everything else copies straight across.
inline StateVec to_state_vector(const RigidState& s) {
    const Vec3 p_body = rotate_to_body(s.euler, s.p_inertial);
    StateVec x{};
    x[sidx::vx] = s.v_body[0];
    x[sidx::vy] = s.v_body[1];
    x[sidx::vz] = s.v_body[2];
    x[sidx::x] = p_body[0];
    x[sidx::y] = p_body[1];
    x[sidx::z] = p_body[2];
    x[sidx::wx] = s.omega_body[0];
    x[sidx::wy] = s.omega_body[1];
    x[sidx::wz] = s.omega_body[2];
    x[sidx::phi] = s.euler[0];
    x[sidx::theta] = s.euler[1];
    x[sidx::psi] = s.euler[2];
    return x;
}

}  // namespace quadgain
