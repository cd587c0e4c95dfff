#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hardyid/rational.hpp"

namespace hardyid {

inline constexpr double kDiskMargin = 1e-3;
inline constexpr double kPoleBall = 0.05;

/// Uniformly sampled path in the unit disk.
class Trajectory {
  public:
    /// Validates: dt > 0, at least 3 samples, every sample modulus
    /// <= 1 - disk_margin.
    Trajectory(double dt, std::vector<Complex> samples, std::string meta = {},
               double disk_margin = kDiskMargin)
        : dt_(dt), samples_(std::move(samples)), meta_(std::move(meta)) {
        if (dt_ <= 0.0) throw InvariantViolation("Trajectory: dt must be positive");
        if (samples_.size() < 3)
            throw InvariantViolation("Trajectory: at least 3 samples required");
        for (const auto& z : samples_) {
            if (std::abs(z) > 1.0 - disk_margin)
                throw InvariantViolation("Trajectory: sample outside radius " +
                                         std::to_string(1.0 - disk_margin));
        }
    }

    double dt() const { return dt_; }
    const std::vector<Complex>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double duration() const { return dt_ * double(samples_.size() - 1); }
    const std::string& meta() const { return meta_; }

  private:
    double dt_;
    std::vector<Complex> samples_;
    std::string meta_;
};

struct GuardSettings {
    double pole_ball = kPoleBall;
    double disk_margin = kDiskMargin;
};

struct SimulationResult {
    Trajectory trajectory;
    bool guard_tripped = false;
    double guard_time = 0.0;  // time of the last accepted sample when tripped
};

/// Classical fixed-step RK4 for zdot = f(z) on the uniform grid 0, dt, ..., T.
///
/// Guards are checked at every RK stage as well as at accepted samples, so a
/// step never evaluates f across a pole. On a guard trip the integration
/// stops at the last valid sample and the truncated trajectory is returned
/// with the flag set. Throws InvalidStart when z0 itself violates a guard.
inline SimulationResult simulate_rk4(const RationalSymbol& f, Complex z0, double T, double dt,
                                     GuardSettings guards = {}) {
    if (dt <= 0.0 || dt > T) throw std::invalid_argument("simulate_rk4: need 0 < dt <= T");
    const auto ok = [&](Complex z) {
        return std::abs(z) <= 1.0 - guards.disk_margin &&
               f.min_distance_to_pole(z) >= guards.pole_ball;
    };
    if (!ok(z0)) throw InvalidStart("simulate_rk4: initial condition violates guards");

    const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
    if (steps < 2) throw std::invalid_argument("simulate_rk4: fewer than 2 steps");

    std::vector<Complex> samples{z0};
    samples.reserve(steps + 1);
    bool tripped = false;
    double trip_time = 0.0;
    Complex z = z0;
    for (std::size_t s = 0; s < steps; ++s) {
        const Complex k1 = f(z);
        const Complex p2 = z + 0.5 * dt * k1;
        if (!ok(p2)) { tripped = true; }
        else {
            const Complex k2 = f(p2);
            const Complex p3 = z + 0.5 * dt * k2;
            if (!ok(p3)) { tripped = true; }
            else {
                const Complex k3 = f(p3);
                const Complex p4 = z + dt * k3;
                if (!ok(p4)) { tripped = true; }
                else {
                    const Complex k4 = f(p4);
                    const Complex next = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    if (!ok(next)) { tripped = true; }
                    else {
                        z = next;
                        samples.push_back(z);
                    }
                }
            }
        }
        if (tripped) {
            trip_time = double(samples.size() - 1) * dt;
            break;
        }
    }
    if (samples.size() < 3)
        throw InvalidStart("simulate_rk4: guard tripped before 3 samples were produced");
    return {Trajectory(dt, std::move(samples), {}, guards.disk_margin), tripped, trip_time};
}

/// Second-order velocity estimates: central differences in the interior,
/// one-sided three-point stencils at the two endpoints.
inline std::vector<Complex> velocity_estimate(const Trajectory& traj) {
    const auto& g = traj.samples();
    const double dt = traj.dt();
    const std::size_t n = g.size();
    std::vector<Complex> v(n);
    v[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    for (std::size_t s = 1; s + 1 < n; ++s) v[s] = (g[s + 1] - g[s - 1]) / (2.0 * dt);
    v[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * dt);
    return v;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, int line) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("invalid number '" + s + "'", line);
    return value;
}

}  // namespace detail

/// CSV layout: header "t,re,im", one row per sample, 17 significant digits,
/// LF line endings. Round-trips samples and dt exactly.
inline void write_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "t,re,im\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        out << detail::format_double(double(s) * traj.dt()) << ','
            << detail::format_double(traj.samples()[s].real()) << ','
            << detail::format_double(traj.samples()[s].imag()) << '\n';
    }
}

/// Parses a trajectory CSV. Throws ParseError (with line number) on malformed
/// rows, missing header, fewer than 3 samples or a non-uniform time column;
/// throws InvariantViolation when a sample leaves the closed disk.
inline Trajectory read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, 0);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty file", 0);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,re,im") throw ParseError("expected header 't,re,im'", line_no);

    std::vector<double> ts;
    std::vector<Complex> samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f0, f1, f2, extra;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2, ','))
            throw ParseError("expected three comma-separated fields", line_no);
        if (std::getline(ss, extra, ',')) throw ParseError("too many fields", line_no);
        ts.push_back(detail::parse_double(f0, line_no));
        samples.push_back({detail::parse_double(f1, line_no), detail::parse_double(f2, line_no)});
    }
    if (samples.size() < 3) throw ParseError("too few samples (need at least 3)", line_no);

    const double dt = ts[1] - ts[0];
    if (dt <= 0.0) throw ParseError("time column is not increasing", 2);
    for (std::size_t s = 0; s < ts.size(); ++s) {
        if (std::abs(ts[s] - double(s) * dt) > 1e-9 * std::max(1.0, std::abs(ts.back())))
            throw ParseError("time column is not a uniform grid", int(s) + 2);
    }
    for (const auto& z : samples) {
        if (std::abs(z) > 1.0)
            throw InvariantViolation("read_csv: sample outside the closed unit disk");
    }
    return Trajectory(dt, std::move(samples), {}, /*disk_margin=*/0.0);
}

}  // namespace hardyid
