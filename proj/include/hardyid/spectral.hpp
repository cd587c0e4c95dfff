#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hardyid/blaschke.hpp"
#include "hardyid/quadrature.hpp"
#include "hardyid/rational.hpp"

namespace hardyid {

/// Taylor-coefficient recovery for functions analytic on |z| <= radius:
/// circle samples are Fourier-transformed and rescaled by radius^{-k}.
struct CoeffExtractor {
    double radius = 0.9;
    int count = 64;
    int nodes = 256;

    CoeffExtractor(double radius_ = 0.9, int count_ = 64, int nodes_ = 0)
        : radius(radius_), count(count_), nodes(nodes_ > 0 ? nodes_ : next_pow2(4 * count_)) {
        if (!(radius > 0.0 && radius < 1.0))
            throw InvariantViolation("CoeffExtractor: radius must lie in (0, 1)");
        if (count < 1) throw InvariantViolation("CoeffExtractor: count must be positive");
        if (nodes < 4 * count || (nodes & (nodes - 1)) != 0)
            throw InvariantViolation("CoeffExtractor: nodes must be a power of two >= 4*count");
    }

    static int next_pow2(int n) {
        int p = 1;
        while (p < n) p <<= 1;
        return p;
    }
};

/// First `ex.count` Taylor coefficients of g, assuming g is analytic on the
/// closed disk of radius ex.radius.
template <typename Fn>
std::vector<Complex> taylor_coeffs(Fn&& g, const CoeffExtractor& ex) {
    const int n = ex.nodes;
    std::vector<Complex> samples(n);
    for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * std::numbers::pi * double(j) / double(n);
        samples[j] = g(ex.radius * Complex{std::cos(phi), std::sin(phi)});
    }
    std::vector<Complex> coeffs(ex.count);
    std::vector<Complex> buf(n);
    double rpow = 1.0;
    for (int k = 0; k < ex.count; ++k) {
        for (int j = 0; j < n; ++j) {
            const double phi = -2.0 * std::numbers::pi * double(j) * double(k) / double(n);
            buf[j] = samples[j] * Complex{std::cos(phi), std::sin(phi)};
        }
        coeffs[k] = pairwise_sum(std::span<const Complex>(buf)) / (double(n) * rpow);
        rpow *= ex.radius;
    }
    return coeffs;
}

/// Hardy-space inner product of two coefficient sequences,
/// <u, v> = sum u_k conj(v_k) over the shared prefix.
inline Complex coeff_inner(std::span<const Complex> u, std::span<const Complex> v) {
    const std::size_t n = std::min(u.size(), v.size());
    std::vector<Complex> terms(n);
    for (std::size_t k = 0; k < n; ++k) terms[k] = u[k] * std::conj(v[k]);
    return pairwise_sum(std::span<const Complex>(terms));
}

/// Compression of the Liouville action g -> f g' to span{P z^n : n < N},
/// the orthonormal basis of the shifted subspace (P = B^2). Row n holds the
/// coordinates of f * (P z^n)' against the basis elements P z^m, so
/// mat(n, m) = <f (P z^n)', P z^m>; eigenvalues coincide with the usual
/// column-action convention (the matrices are transposes).
///
/// Requires f's poles to match B's zeros and ex.radius to exceed the largest
/// pole modulus by at least 0.05 so every sampled function is analytic on the
/// extraction circle.
inline Eigen::MatrixXcd finite_section(const BlaschkeProduct& B, const RationalSymbol& f, int N,
                                       const CoeffExtractor& ex) {
    if (ex.radius < B.max_zero_modulus() + 0.05)
        throw InvariantViolation("finite_section: extraction radius too close to a pole");
    int pole_degree = 0;
    for (const auto& z : B.zeros()) pole_degree += 2 * z.multiplicity;
    if (N > ex.count - pole_degree)
        throw std::invalid_argument("finite_section: N exceeds count - degree(P)");

    // coefficients of P z^m: extract P once and shift
    const auto p_coeffs = taylor_coeffs([&](Complex z) { return B.pshift(z).value; }, ex);

    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(N, N);
    for (int n = 0; n < N; ++n) {
        const auto image = taylor_coeffs(
            [&](Complex z) {
                const PshiftValue p = B.pshift(z);
                Complex zpow = 1.0;
                for (int i = 0; i + 1 < n; ++i) zpow *= z;  // z^{n-1}
                const Complex dz =
                    (n > 0 ? double(n) * p.value * zpow : Complex{0.0, 0.0}) +
                    p.derivative * (n > 0 ? zpow * z : Complex{1.0, 0.0});
                return f(z) * dz;
            },
            ex);
        for (int m = 0; m < N; ++m) {
            std::vector<Complex> basis(ex.count, Complex{});
            for (int k = 0; k + m < ex.count; ++k) basis[k + m] = p_coeffs[k];
            mat(n, m) = coeff_inner(image, basis);
        }
    }
    return mat;
}

/// Eigenvalues of a finite section. Numerically triangular matrices are
/// recognized first and their spectrum read off the diagonal: the QR
/// iteration's eps-level backward error would otherwise scatter the
/// eigenvalues of defective shift matrices by O(eps^(1/N)).
inline std::vector<Complex> finite_section_eigs(const Eigen::MatrixXcd& mat) {
    const Eigen::Index n = mat.rows();
    const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
    bool lower = true, upper = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j > i && std::abs(mat(i, j)) > 1e-12 * scale) lower = false;
            if (j < i && std::abs(mat(i, j)) > 1e-12 * scale) upper = false;
        }
    }
    std::vector<Complex> eigs(n);
    if (lower || upper) {
        for (Eigen::Index i = 0; i < n; ++i) eigs[i] = mat(i, i);
        return eigs;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mat, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < n; ++i) eigs[i] = es.eigenvalues()(i);
    return eigs;
}

/// Coefficient recursion forced by (A - lambda) on the shifted monomial
/// basis for the origin-pole symbol: (n+2) a_n = lambda a_{n-2} with
/// a_{-1} = a_{-2} = 0. The optional seed makes the hypothetical nonzero
/// start inspectable; the admissible seed is 0, which forces the whole
/// sequence to vanish for every lambda.
inline std::vector<Complex> recursion_check(Complex lambda, int n_max, Complex a0_seed = {}) {
    std::vector<Complex> a(n_max + 1, Complex{});
    if (n_max >= 0) a[0] = a0_seed;
    for (int n = 2; n <= n_max; ++n) a[n] = lambda * a[n - 2] / double(n + 2);
    return a;
}

struct DensityBoundReport {
    double grid_sup = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// Checks the sup-norm bound that makes f * (P z^n)' bounded on the disk:
/// grid_sup is the max of |f(z) (P z^n)'(z)| over a polar grid, and bound is
/// the a-priori estimate
///   (sum|p_k|) / (|lead q| * prod (1-|a_k|)^{m_k}) * (n + 2 sum m_k (1+|a_k|)/(1-|a_k|))
/// using |B| <= 1, |(B^2)' / B| = |2 B'| and the factor-wise bound
/// |1 - conj(a_k) z| > 1 - |a_k|.
inline DensityBoundReport density_bound_check(const BlaschkeProduct& B, const RationalSymbol& f,
                                              int n, int grid_size) {
    double sup = 0.0;
    for (int i = 1; i <= grid_size; ++i) {
        const double r = (1.0 - 1e-6) * double(i) / double(grid_size);
        for (int j = 0; j < grid_size; ++j) {
            const double phi = 2.0 * std::numbers::pi * double(j) / double(grid_size);
            const Complex z = r * Complex{std::cos(phi), std::sin(phi)};
            if (f.min_distance_to_pole(z) < 1e-7) continue;
            const PshiftValue p = B.pshift(z);
            Complex zpow = 1.0;
            for (int k = 0; k + 1 < n; ++k) zpow *= z;
            const Complex dz = (n > 0 ? double(n) * p.value * zpow : Complex{0.0, 0.0}) +
                               p.derivative * (n > 0 ? zpow * z : Complex{1.0, 0.0});
            sup = std::max(sup, std::abs(f(z) * dz));
        }
    }
    double bound = f.p().coeff_l1() / std::abs(f.q().leading());
    double bprime = 0.0;
    for (const auto& zero : B.zeros()) {
        const double mod = std::abs(zero.location);
        for (int k = 0; k < zero.multiplicity; ++k) bound /= (1.0 - mod);
        bprime += double(zero.multiplicity) * (1.0 + mod) / (1.0 - mod);
    }
    bound *= double(n) + 2.0 * bprime;
    return {sup, bound, sup <= bound * (1.0 + 1e-9)};
}

}  // namespace hardyid
