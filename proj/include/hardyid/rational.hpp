#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "hardyid/polynomial.hpp"

namespace hardyid {

/// Rational symbol f = p/q with an explicit list of interior poles.
///
/// Poles may be supplied explicitly (they win over root finding, which is
/// ill-conditioned for clustered roots) or computed from q via poles_of.
/// Construction enforces:
///   - every pole modulus <= 1 - pole_margin,
///   - summed multiplicities equal degree(q) and q vanishes at each pole,
///   - p does not vanish at a listed pole (no disguised removable point).
class RationalSymbol {
  public:
    RationalSymbol(Polynomial p, Polynomial q, std::vector<RootCluster> poles,
                   double pole_margin = kPoleMargin)
        : p_(std::move(p)), q_(std::move(q)), poles_(std::move(poles)) {
        validate(pole_margin);
    }

    /// Poles computed from q (empty when q is constant).
    RationalSymbol(Polynomial p, Polynomial q, double pole_margin = kPoleMargin)
        : p_(std::move(p)), q_(std::move(q)) {
        if (q_.degree() >= 1) poles_ = poles_of(q_, 1e-8, pole_margin);
        validate(pole_margin);
    }

    const Polynomial& p() const { return p_; }
    const Polynomial& q() const { return q_; }
    const std::vector<RootCluster>& poles() const { return poles_; }

    /// p(z)/q(z). Throws NearPole when z is within pole_guard of a listed pole.
    Complex eval(Complex z, double pole_guard = kPoleGuard) const {
        for (const auto& pole : poles_) {
            if (std::abs(z - pole.location) < pole_guard)
                throw NearPole("rational evaluation within pole guard at z=(" +
                               std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")");
        }
        return p_(z) / q_(z);
    }

    Complex operator()(Complex z) const { return eval(z); }

    double min_distance_to_pole(Complex z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& pole : poles_) d = std::min(d, std::abs(z - pole.location));
        return d;
    }

  private:
    void validate(double pole_margin) const {
        if (q_.is_zero()) throw InvariantViolation("RationalSymbol: zero denominator");
        int mult_sum = 0;
        const double qscale = q_.coeff_l2();
        const double pscale = p_.coeff_l2();
        for (const auto& pole : poles_) {
            if (std::abs(pole.location) > 1.0 - pole_margin)
                throw NoInteriorPole("RationalSymbol: pole with modulus " +
                                     std::to_string(std::abs(pole.location)) +
                                     " too close to the boundary");
            if (std::abs(q_(pole.location)) >= 1e-10 * qscale)
                throw InvariantViolation("RationalSymbol: q does not vanish at a listed pole");
            if (!p_.is_zero() && std::abs(p_(pole.location)) < 1e-10 * pscale)
                throw InvariantViolation(
                    "RationalSymbol: p and q share a root; the pole is removable");
            mult_sum += pole.multiplicity;
        }
        if (mult_sum != std::max(q_.degree(), 0))
            throw InvariantViolation("RationalSymbol: pole multiplicities do not sum to deg q");
    }

    Polynomial p_;
    Polynomial q_;
    std::vector<RootCluster> poles_;
};

}  // namespace hardyid
