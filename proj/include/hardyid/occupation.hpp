#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "hardyid/kernels.hpp"
#include "hardyid/quadrature.hpp"
#include "hardyid/spectral.hpp"
#include "hardyid/trajectory.hpp"

namespace hardyid {

/// Occupation functional: the integral of g along the trajectory,
/// int_0^T g(gamma(t)) dt.
template <typename Fn>
Complex occupation_apply(const Trajectory& traj, Fn&& g, QuadRule rule = QuadRule::trapezoid) {
    std::vector<Complex> values(traj.size());
    for (std::size_t s = 0; s < traj.size(); ++s) values[s] = g(traj.samples()[s]);
    return integrate(values, traj.dt(), rule);
}

/// Representative of the functional v -> <A_h v, Gamma> on the shifted
/// subspace: z -> int conj(h(gamma(t))) * d/dconj(w) K(gamma(t), z) dt.
/// The symbol values h(gamma(t_s)) are precomputed once; evaluation at many
/// z is then a single weighted pass over the grid.
class AdjointRepresentative {
  public:
    AdjointRepresentative(BlaschkeProduct B, const Trajectory& traj,
                          std::vector<Complex> symbol_values,
                          QuadRule rule = QuadRule::trapezoid)
        : B_(std::move(B)), traj_(traj), symbol_values_(std::move(symbol_values)) {
        if (symbol_values_.size() != traj_.size())
            throw InvariantViolation("AdjointRepresentative: symbol/trajectory length mismatch");
        weights_ = quadrature_weights(traj_.size(), rule);
    }

    template <typename Fn>
    AdjointRepresentative(BlaschkeProduct B, const Trajectory& traj, Fn&& symbol,
                          QuadRule rule = QuadRule::trapezoid)
        : AdjointRepresentative(std::move(B), traj, sample(traj, symbol), rule) {}

    Complex operator()(Complex z) const {
        std::vector<Complex> terms(traj_.size());
        for (std::size_t s = 0; s < traj_.size(); ++s) {
            terms[s] = weights_[s] * std::conj(symbol_values_[s]) *
                       restricted_kernel_dwbar(B_, traj_.samples()[s], z);
        }
        return pairwise_sum(std::span<const Complex>(terms)) * traj_.dt();
    }

    const BlaschkeProduct& blaschke() const { return B_; }
    const Trajectory& trajectory() const { return traj_; }

  private:
    template <typename Fn>
    static std::vector<Complex> sample(const Trajectory& traj, Fn&& symbol) {
        std::vector<Complex> v(traj.size());
        for (std::size_t s = 0; s < traj.size(); ++s) v[s] = symbol(traj.samples()[s]);
        return v;
    }

    BlaschkeProduct B_;
    Trajectory traj_;
    std::vector<Complex> symbol_values_;
    std::vector<double> weights_;
};

inline Complex adjoint_apply(const AdjointRepresentative& rep, Complex z) { return rep(z); }

/// Endpoint form of the adjoint representative, valid when the trajectory is
/// an integral curve of the symbol: K(gamma(T), z) - K(gamma(0), z) in the
/// shifted-subspace kernel.
inline Complex adjoint_endpoint(const BlaschkeProduct& B, Complex gamma0, Complex gammaT,
                                Complex z) {
    return restricted_kernel(B, gammaT, z) - restricted_kernel(B, gamma0, z);
}

/// Residual of the fundamental-theorem identity along an integral curve:
/// | int f(gamma) (B^2 g)'(gamma) dt  -  (B^2 g(gamma(T)) - B^2 g(gamma(0))) |.
/// For trajectories that do not solve zdot = f(z) the residual quantifies the
/// hypothesis violation instead of vanishing.
inline double verify_adjoint_identity(const BlaschkeProduct& B, const RationalSymbol& f,
                                      const Trajectory& traj, const Polynomial& g,
                                      QuadRule rule = QuadRule::trapezoid) {
    const Polynomial gp = g.derivative();
    std::vector<Complex> values(traj.size());
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const Complex z = traj.samples()[s];
        const PshiftValue P = B.pshift(z);
        values[s] = f(z) * (P.derivative * g(z) + P.value * gp(z));
    }
    const Complex lhs = integrate(values, traj.dt(), rule);
    const auto b2g = [&](Complex z) { return B.pshift(z).value * g(z); };
    const Complex rhs = b2g(traj.samples().back()) - b2g(traj.samples().front());
    return std::abs(lhs - rhs);
}

/// Residual of the Leibniz pairing <f (B^2 g)', K_w^[j-1]> =
/// (f (B^2 g)')^{(j-1)}(w): the left side is evaluated in coefficient space,
/// the right side by Richardson-extrapolated central differences.
inline double verify_leibniz_pairing(const BlaschkeProduct& B, const RationalSymbol& f,
                                     const Polynomial& g, Complex w, int j,
                                     const CoeffExtractor& ex = CoeffExtractor{}) {
    if (j < 1) throw std::invalid_argument("verify_leibniz_pairing: j must be >= 1");
    const Polynomial gp = g.derivative();
    const auto u = [&](Complex z) {
        const PshiftValue P = B.pshift(z);
        return f(z) * (P.derivative * g(z) + P.value * gp(z));
    };
    const auto coeffs = taylor_coeffs(u, ex);

    // pairing against K_w^[j-1]: sum_{k >= j-1} c_k * k!/(k-j+1)! * w^{k-j+1}
    const int d = j - 1;
    std::vector<Complex> terms;
    terms.reserve(coeffs.size());
    for (int k = d; k < int(coeffs.size()); ++k) {
        double fall = 1.0;
        for (int i = 0; i < d; ++i) fall *= double(k - i);
        terms.push_back(coeffs[k] * fall * std::pow(w, k - d));
    }
    const Complex lhs = pairwise_sum(std::span<const Complex>(terms));

    // (j-1)-th derivative of u at w, fourth-order stencils
    const double h = 1e-3;
    Complex rhs;
    if (d == 0) {
        rhs = u(w);
    } else if (d == 1) {
        rhs = (-u(w + 2 * h) + 8.0 * u(w + h) - 8.0 * u(w - h) + u(w - 2 * h)) / (12.0 * h);
    } else if (d == 2) {
        rhs = (-u(w + 2 * h) + 16.0 * u(w + h) - 30.0 * u(w) + 16.0 * u(w - h) - u(w - 2 * h)) /
              (12.0 * h * h);
    } else {
        // Richardson on repeated second differences for higher orders
        const auto deriv = [&](auto&& self, int order, Complex at, double step) -> Complex {
            if (order == 0) return u(at);
            return (self(self, order - 1, at + step, step) -
                    self(self, order - 1, at - step, step)) /
                   (2.0 * step);
        };
        const Complex coarse = deriv(deriv, d, w, h);
        const Complex fine = deriv(deriv, d, w, h / 2.0);
        rhs = (4.0 * fine - coarse) / 3.0;
    }
    return std::abs(lhs - rhs);
}

}  // namespace hardyid
