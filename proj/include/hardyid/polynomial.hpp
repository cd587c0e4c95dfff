#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hardyid/errors.hpp"
#include "hardyid/types.hpp"

namespace hardyid {

/// Default margin keeping poles away from the unit circle: construction and
/// root finding reject locations with modulus above 1 - kPoleMargin.
inline constexpr double kPoleMargin = 0.05;

/// Minimum distance to a pole at which rational evaluation is allowed.
inline constexpr double kPoleGuard = 1e-8;

/// A root location together with its multiplicity.
struct RootCluster {
    Complex location;
    int multiplicity = 1;
};

/// Complex univariate polynomial, coefficients in ascending degree order.
/// Canonical form: the trailing coefficient is nonzero unless the polynomial
/// is identically zero (empty coefficient list).
class Polynomial {
  public:
    Polynomial() = default;

    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        while (!coeffs_.empty() && coeffs_.back() == Complex{0.0, 0.0}) coeffs_.pop_back();
    }

    Polynomial(std::initializer_list<Complex> coeffs)
        : Polynomial(std::vector<Complex>(coeffs)) {}

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// Degree of the polynomial; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    Complex leading() const { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

    /// Horner evaluation.
    Complex operator()(Complex z) const {
        Complex acc{0.0, 0.0};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial{};
        std::vector<Complex> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = double(k) * coeffs_[k];
        return Polynomial(std::move(d));
    }

    /// Sum of coefficient magnitudes; upper bound for |p| on the closed disk.
    double coeff_l1() const {
        double s = 0.0;
        for (auto c : coeffs_) s += std::abs(c);
        return s;
    }

    double coeff_l2() const {
        double s = 0.0;
        for (auto c : coeffs_) s += std::norm(c);
        return std::sqrt(s);
    }

    /// Monic product of (z - r)^m over the given clusters, scaled by `lead`.
    static Polynomial from_roots(const std::vector<RootCluster>& roots, Complex lead) {
        std::vector<Complex> c{lead};
        for (const auto& r : roots) {
            for (int j = 0; j < r.multiplicity; ++j) {
                std::vector<Complex> next(c.size() + 1, Complex{});
                for (std::size_t k = 0; k < c.size(); ++k) {
                    next[k] += c[k] * (-r.location);
                    next[k + 1] += c[k];
                }
                c = std::move(next);
            }
        }
        return Polynomial(std::move(c));
    }

  private:
    std::vector<Complex> coeffs_;
};

/// All roots of q, computed as eigenvalues of the companion matrix, with
/// roots closer than cluster_tol merged into a single location (centroid of
/// the cluster) carrying the summed multiplicity. Output is sorted by real
/// part, then imaginary part.
///
/// Throws NoInteriorPole if any clustered root has modulus above
/// 1 - pole_margin: the shifted-subspace method needs interior poles.
inline std::vector<RootCluster> poles_of(const Polynomial& q, double cluster_tol = 1e-8,
                                         double pole_margin = kPoleMargin) {
    const int d = q.degree();
    if (d < 1) throw std::invalid_argument("poles_of: polynomial degree must be >= 1");

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -q.coeffs()[i] / q.leading();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
    std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    std::vector<RootCluster> clusters;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        Complex sum = roots[i];
        int count = 1;
        used[i] = true;
        // chained merge: anything within cluster_tol of a member joins
        bool grew = true;
        std::vector<std::size_t> members{i};
        while (grew) {
            grew = false;
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (used[j]) continue;
                for (auto m : members) {
                    if (std::abs(roots[j] - roots[m]) <= cluster_tol) {
                        used[j] = true;
                        members.push_back(j);
                        sum += roots[j];
                        ++count;
                        grew = true;
                        break;
                    }
                }
            }
        }
        clusters.push_back({sum / double(count), count});
    }
    std::sort(clusters.begin(), clusters.end(), [](const RootCluster& a, const RootCluster& b) {
        return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                      : a.location.imag() < b.location.imag();
    });

    for (const auto& c : clusters) {
        if (std::abs(c.location) > 1.0 - pole_margin) {
            throw NoInteriorPole("poles_of: root with modulus " +
                                 std::to_string(std::abs(c.location)) +
                                 " is not inside the margin 1 - " + std::to_string(pole_margin));
        }
    }
    return clusters;
}

}  // namespace hardyid
