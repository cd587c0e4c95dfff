#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "hardyid/polynomial.hpp"

namespace hardyid {

/// Value and derivative of the squared product P = B^2 at one point.
struct PshiftValue {
    Complex value;       // P(z)  = B(z)^2
    Complex derivative;  // P'(z) = 2 B(z) B'(z)
};

/// Finite Blaschke product B(z) = prod_k ((z - a_k) / (1 - conj(a_k) z))^{m_k}
/// with all designated zeros a_k strictly inside the unit disk. Multiplicities
/// are handled by exponentiating factors, not by repeating zeros. An empty
/// zero set gives the constant product B == 1.
class BlaschkeProduct {
  public:
    BlaschkeProduct() = default;

    explicit BlaschkeProduct(std::vector<RootCluster> zeros) : zeros_(std::move(zeros)) {
        for (const auto& z : zeros_) {
            if (std::abs(z.location) >= 1.0)
                throw InvariantViolation("BlaschkeProduct: zero with modulus >= 1");
            if (z.multiplicity < 1)
                throw InvariantViolation("BlaschkeProduct: multiplicity must be positive");
        }
    }

    const std::vector<RootCluster>& zeros() const { return zeros_; }

    Complex eval(Complex z) const {
        Complex v{1.0, 0.0};
        for (const auto& f : zeros_) v *= pow_int(factor(f.location, z), f.multiplicity);
        return v;
    }

    Complex operator()(Complex z) const { return eval(z); }

    /// dB/dz. Away from zeros this is the logarithmic-derivative form
    /// B'(z) = B(z) * sum_k m_k (1-|a_k|^2) / ((z-a_k)(1-conj(a_k) z));
    /// within 1e-6 of a zero the explicit product rule is used instead, which
    /// stays finite when a factor vanishes.
    Complex derivative(Complex z) const {
        bool near_zero = false;
        for (const auto& f : zeros_)
            if (std::abs(z - f.location) < 1e-6) near_zero = true;

        if (!near_zero) {
            Complex logsum{0.0, 0.0};
            for (const auto& f : zeros_) {
                const Complex a = f.location;
                logsum += double(f.multiplicity) * (1.0 - std::norm(a)) /
                          ((z - a) * (1.0 - std::conj(a) * z));
            }
            return eval(z) * logsum;
        }

        Complex total{0.0, 0.0};
        for (std::size_t j = 0; j < zeros_.size(); ++j) {
            const Complex a = zeros_[j].location;
            const int m = zeros_[j].multiplicity;
            Complex term = double(m) * pow_int(factor(a, z), m - 1) * factor_derivative(a, z);
            for (std::size_t k = 0; k < zeros_.size(); ++k) {
                if (k == j) continue;
                term *= pow_int(factor(zeros_[k].location, z), zeros_[k].multiplicity);
            }
            total += term;
        }
        return total;
    }

    /// P = B^2 and P' = 2 B B' in one evaluation.
    PshiftValue pshift(Complex z) const {
        const Complex b = eval(z);
        return {b * b, 2.0 * b * derivative(z)};
    }

    /// Largest zero modulus (0 for the trivial product).
    double max_zero_modulus() const {
        double m = 0.0;
        for (const auto& z : zeros_) m = std::max(m, std::abs(z.location));
        return m;
    }

    double min_distance_to_zero(Complex z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& f : zeros_) d = std::min(d, std::abs(z - f.location));
        return d;
    }

  private:
    static Complex factor(Complex a, Complex z) { return (z - a) / (1.0 - std::conj(a) * z); }

    static Complex factor_derivative(Complex a, Complex z) {
        const Complex denom = 1.0 - std::conj(a) * z;
        return (1.0 - std::norm(a)) / (denom * denom);
    }

    static Complex pow_int(Complex base, int n) {
        Complex r{1.0, 0.0};
        for (int i = 0; i < n; ++i) r *= base;
        return r;
    }

    std::vector<RootCluster> zeros_;
};

}  // namespace hardyid
