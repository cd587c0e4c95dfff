#pragma once

#include <cmath>
#include <complex>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hardyid/kernels.hpp"
#include "hardyid/occupation.hpp"
#include "hardyid/quadrature.hpp"
#include "hardyid/trajectory.hpp"

namespace hardyid {

/// Basis symbol for the expansion of the shifted field: either a monomial
/// z^k or a Cauchy-type element 1/(1 - conj(a) z)^m, optionally scaled.
/// Cauchy entries exist because the shifted field of a rational symbol is
/// exactly a finite combination of them (partial fractions in the reflected
/// poles 1/conj(a)).
struct DictionaryEntry {
    enum class Kind { monomial, cauchy };

    Kind kind = Kind::monomial;
    int power = 0;      // monomial degree
    Complex center{};   // cauchy center a (inside the disk)
    int order = 1;      // cauchy exponent m >= 1
    Complex scale{1.0, 0.0};

    static DictionaryEntry monomial(int k, Complex scale = {1.0, 0.0}) {
        DictionaryEntry e;
        e.kind = Kind::monomial;
        e.power = k;
        e.scale = scale;
        return e;
    }

    static DictionaryEntry cauchy(Complex a, int m, Complex scale = {1.0, 0.0}) {
        DictionaryEntry e;
        e.kind = Kind::cauchy;
        e.center = a;
        e.order = m;
        e.scale = scale;
        return e;
    }

    Complex operator()(Complex z) const {
        if (kind == Kind::monomial) {
            Complex v{1.0, 0.0};
            for (int i = 0; i < power; ++i) v *= z;
            return scale * v;
        }
        Complex denom{1.0, 0.0};
        const Complex base = 1.0 - std::conj(center) * z;
        for (int i = 0; i < order; ++i) denom *= base;
        return scale / denom;
    }

    /// Same basis function, ignoring scale.
    bool same_shape(const DictionaryEntry& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::monomial) return power == o.power;
        return center == o.center && order == o.order;
    }
};

/// Ordered dictionary of basis symbols; entries must be pairwise distinct
/// (up to scale) and bounded on the closed disk.
class Dictionary {
  public:
    explicit Dictionary(std::vector<DictionaryEntry> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw InvariantViolation("Dictionary: at least one entry required");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const auto& e = entries_[i];
            if (e.kind == DictionaryEntry::Kind::monomial && e.power < 0)
                throw InvariantViolation("Dictionary: negative monomial power");
            if (e.kind == DictionaryEntry::Kind::cauchy &&
                (e.order < 1 || std::abs(e.center) >= 1.0))
                throw InvariantViolation("Dictionary: cauchy entry unbounded on the disk");
            for (std::size_t j = i + 1; j < entries_.size(); ++j)
                if (e.same_shape(entries_[j]))
                    throw InvariantViolation("Dictionary: duplicate entries");
        }
    }

    static Dictionary monomials(int count) {
        std::vector<DictionaryEntry> e;
        for (int k = 0; k < count; ++k) e.push_back(DictionaryEntry::monomial(k));
        return Dictionary(std::move(e));
    }

    /// Cauchy family adapted to a pole set: 1/(1 - conj(a) z)^m for
    /// m = 1..2*mult per pole, preceded by monomials 0..monomial_count-1.
    static Dictionary cauchy_for_poles(const std::vector<RootCluster>& poles,
                                       int monomial_count = 0) {
        std::vector<DictionaryEntry> e;
        for (int k = 0; k < monomial_count; ++k) e.push_back(DictionaryEntry::monomial(k));
        for (const auto& p : poles)
            for (int m = 1; m <= 2 * p.multiplicity; ++m)
                e.push_back(DictionaryEntry::cauchy(p.location, m));
        return Dictionary(std::move(e));
    }

    std::size_t size() const { return entries_.size(); }
    const DictionaryEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<DictionaryEntry>& entries() const { return entries_; }

  private:
    std::vector<DictionaryEntry> entries_;
};

enum class RhsEstimator { data_integral, endpoint_thm43, endpoint_sec7 };

inline std::string to_string(RhsEstimator e) {
    switch (e) {
        case RhsEstimator::data_integral: return "data_integral";
        case RhsEstimator::endpoint_thm43: return "endpoint_thm43";
        case RhsEstimator::endpoint_sec7: return "endpoint_sec7";
    }
    return "unknown";
}

struct GramSystem {
    Eigen::MatrixXcd G;
    Eigen::VectorXcd b;
    std::vector<double> traj_gram_norms;  // Frobenius norm of each contribution
    std::vector<double> traj_rhs_norms;
};

struct IdentificationResult {
    Eigen::VectorXcd theta;
    int rank = 0;
    std::vector<double> singular_values;
    double residual = 0.0;
    std::string estimator;
};

namespace detail {

struct Contribution {
    Eigen::MatrixXcd G;
    Eigen::VectorXcd b;
};

/// One trajectory's contribution to the normal equations:
///   G_ij += sum_{r,s} conj(Z_i(g_r)) w_r kappa(g_r, g_s) w_s Z_j(g_s)
///   b_i  += as dictated by the estimator.
/// All reductions are pairwise sums in fixed index order.
inline Contribution trajectory_contribution(const BlaschkeProduct& B, const Dictionary& dict,
                                            const Trajectory& traj,
                                            const std::vector<Complex>* velocity, QuadRule rule,
                                            std::optional<RhsEstimator> estimator) {
    const std::size_t S = traj.size();
    const std::size_t M = dict.size();
    const auto& g = traj.samples();
    auto w = quadrature_weights(S, rule);
    for (auto& x : w) x *= traj.dt();

    Eigen::MatrixXcd Z(S, M);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t i = 0; i < M; ++i) Z(s, i) = dict[i](g[s]);

    Eigen::MatrixXcd kappa(S, S);
    for (std::size_t r = 0; r < S; ++r)
        for (std::size_t s = 0; s < S; ++s) kappa(r, s) = restricted_kernel_mixed(B, g[r], g[s]);

    // Y(r, j) = sum_s kappa(r, s) w_s Z(s, j)
    Eigen::MatrixXcd Y(S, M);
    std::vector<Complex> buf(S);
    for (std::size_t r = 0; r < S; ++r) {
        for (std::size_t j = 0; j < M; ++j) {
            for (std::size_t s = 0; s < S; ++s) buf[s] = kappa(r, s) * w[s] * Z(s, j);
            Y(r, j) = pairwise_sum(std::span<const Complex>(buf));
        }
    }

    Contribution out;
    out.G.resize(M, M);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < M; ++j) {
            for (std::size_t r = 0; r < S; ++r) buf[r] = std::conj(Z(r, i)) * w[r] * Y(r, j);
            out.G(i, j) = pairwise_sum(std::span<const Complex>(buf).first(S));
        }
    }

    out.b = Eigen::VectorXcd::Zero(M);
    if (!estimator) return out;

    if (*estimator == RhsEstimator::data_integral) {
        if (velocity == nullptr || velocity->size() != S)
            throw MissingVelocities("data_integral estimator needs velocity data");
        // F_hat(t) = P(gamma(t)) * gammadot(t)
        std::vector<Complex> Fhat(S);
        for (std::size_t s = 0; s < S; ++s) Fhat[s] = B.pshift(g[s]).value * (*velocity)[s];
        std::vector<Complex> yF(S);
        for (std::size_t r = 0; r < S; ++r) {
            for (std::size_t s = 0; s < S; ++s) buf[s] = kappa(r, s) * w[s] * Fhat[s];
            yF[r] = pairwise_sum(std::span<const Complex>(buf).first(S));
        }
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t r = 0; r < S; ++r) buf[r] = std::conj(Z(r, i)) * w[r] * yF[r];
            out.b(i) = pairwise_sum(std::span<const Complex>(buf).first(S));
        }
    } else if (*estimator == RhsEstimator::endpoint_thm43) {
        const Complex gT = g.back(), g0 = g.front();
        for (std::size_t i = 0; i < M; ++i) {
            AdjointRepresentative rep(B, traj, [&](Complex z) { return dict[i](z); }, rule);
            out.b(i) = std::conj(rep(gT)) - std::conj(rep(g0));
        }
    } else {  // endpoint_sec7
        const Complex gT = g.back(), g0 = g.front();
        const auto uprime = [&](Complex z) {
            const PshiftValue P = B.pshift(z);
            const Complex sT = szego(gT, z), s0 = szego(g0, z);
            return P.derivative * (sT - s0) +
                   P.value * (std::conj(gT) * sT * sT - std::conj(g0) * s0 * s0);
        };
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t s = 0; s < S; ++s) buf[s] = w[s] * dict[i](g[s]) * uprime(g[s]);
            out.b(i) = pairwise_sum(std::span<const Complex>(buf).first(S));
        }
    }
    return out;
}

inline void hermitian_cleanup(Eigen::MatrixXcd& G) {
    G = 0.5 * (G + G.adjoint()).eval();
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
        G(i, i) = Complex{G(i, i).real(), 0.0};
        for (Eigen::Index j = i + 1; j < G.cols(); ++j) G(j, i) = std::conj(G(i, j));
    }
}

}  // namespace detail

/// Trajectory Gram system and right-hand side in one pass; per-trajectory
/// contributions may be computed concurrently (each is internally
/// deterministic) and are reduced in trajectory order, so the result does
/// not depend on the thread count.
inline GramSystem assemble_system(const BlaschkeProduct& B, const Dictionary& dict,
                                  std::span<const Trajectory> trajs,
                                  const std::vector<std::vector<Complex>>& velocities,
                                  QuadRule rule, RhsEstimator estimator, int threads = 1) {
    if (trajs.empty()) throw InvariantViolation("assemble_system: at least one trajectory");
    if (estimator == RhsEstimator::data_integral && velocities.size() != trajs.size())
        throw MissingVelocities("assemble_system: one velocity sequence per trajectory required");

    const std::size_t n = trajs.size();
    std::vector<detail::Contribution> parts(n);
    const auto work = [&](std::size_t t) {
        const std::vector<Complex>* vel =
            (estimator == RhsEstimator::data_integral) ? &velocities[t] : nullptr;
        return detail::trajectory_contribution(B, dict, trajs[t], vel, rule, estimator);
    };
    if (threads <= 1) {
        for (std::size_t t = 0; t < n; ++t) parts[t] = work(t);
    } else {
        std::vector<std::future<detail::Contribution>> futures(n);
        std::size_t next = 0;
        while (next < n) {
            const std::size_t batch = std::min<std::size_t>(threads, n - next);
            for (std::size_t k = 0; k < batch; ++k)
                futures[next + k] = std::async(std::launch::async, work, next + k);
            for (std::size_t k = 0; k < batch; ++k) parts[next + k] = futures[next + k].get();
            next += batch;
        }
    }

    GramSystem sys;
    const std::size_t M = dict.size();
    sys.G = Eigen::MatrixXcd::Zero(M, M);
    sys.b = Eigen::VectorXcd::Zero(M);
    for (std::size_t t = 0; t < n; ++t) {
        sys.G += parts[t].G;
        sys.b += parts[t].b;
        sys.traj_gram_norms.push_back(parts[t].G.norm());
        sys.traj_rhs_norms.push_back(parts[t].b.norm());
    }
    detail::hermitian_cleanup(sys.G);
    return sys;
}

/// Gram matrix A_[Z,Z] only (Hermitian-symmetrized).
inline Eigen::MatrixXcd gram_assemble(const BlaschkeProduct& B, const Dictionary& dict,
                                      std::span<const Trajectory> trajs,
                                      QuadRule rule = QuadRule::trapezoid) {
    if (trajs.empty()) throw InvariantViolation("gram_assemble: at least one trajectory");
    const std::size_t M = dict.size();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(M, M);
    for (const auto& traj : trajs)
        G += detail::trajectory_contribution(B, dict, traj, nullptr, rule, std::nullopt).G;
    detail::hermitian_cleanup(G);
    return G;
}

/// Right-hand side B_[F,Z] under the selected estimator. data_integral needs
/// one velocity sequence per trajectory; the endpoint estimators ignore them.
inline Eigen::VectorXcd rhs_assemble(const BlaschkeProduct& B, const Dictionary& dict,
                                     std::span<const Trajectory> trajs,
                                     const std::vector<std::vector<Complex>>& velocities,
                                     QuadRule rule, RhsEstimator estimator) {
    if (trajs.empty()) throw InvariantViolation("rhs_assemble: at least one trajectory");
    if (estimator == RhsEstimator::data_integral && velocities.size() != trajs.size())
        throw MissingVelocities("rhs_assemble: one velocity sequence per trajectory required");
    const std::size_t M = dict.size();
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(M);
    for (std::size_t t = 0; t < trajs.size(); ++t) {
        const std::vector<Complex>* vel =
            (estimator == RhsEstimator::data_integral) ? &velocities[t] : nullptr;
        b += detail::trajectory_contribution(B, dict, trajs[t], vel, rule, estimator).b;
    }
    return b;
}

/// Minimum-norm least-squares solve of G theta = b through the SVD; singular
/// values below svd_rel_tol * sigma_max are treated as zero. With real_theta
/// the real and imaginary parts are stacked into a real system first.
inline IdentificationResult solve(const Eigen::MatrixXcd& G, const Eigen::VectorXcd& b,
                                  double svd_rel_tol = 1e-10, bool real_theta = false) {
    IdentificationResult res;
    const Eigen::Index M = G.cols();
    if (!real_theta) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        Eigen::VectorXcd coeff = svd.matrixU().adjoint() * b;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (smax > 0.0 && sv(i) > svd_rel_tol * smax) {
                coeff(i) /= sv(i);
                ++res.rank;
            } else {
                coeff(i) = 0.0;
            }
            res.singular_values.push_back(sv(i));
        }
        res.theta = svd.matrixV() * coeff;
    } else {
        Eigen::MatrixXd A(2 * G.rows(), M);
        A << G.real(), G.imag();
        Eigen::VectorXd y(2 * b.size());
        y << b.real(), b.imag();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        Eigen::VectorXd coeff = svd.matrixU().transpose() * y;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (smax > 0.0 && sv(i) > svd_rel_tol * smax) {
                coeff(i) /= sv(i);
                ++res.rank;
            } else {
                coeff(i) = 0.0;
            }
            res.singular_values.push_back(sv(i));
        }
        res.theta = (svd.matrixV() * coeff).cast<Complex>();
    }
    const double bnorm = b.norm();
    res.residual = bnorm > 0.0 ? (G * res.theta - b).norm() / bnorm : 0.0;
    return res;
}

/// Endpoint-difference estimator on the raw field: each trajectory is split
/// into `windows` contiguous sub-intervals, every sub-interval contributing
/// one equation  gamma(end) - gamma(start) = sum_i theta_i int Y_i(gamma) dt.
/// The stacked complex least-squares problem is solved by SVD pseudoinverse.
/// Identifies f itself, with no Blaschke shift.
inline IdentificationResult baseline_identify(std::span<const Trajectory> trajs,
                                              const Dictionary& dict_Y, int windows,
                                              QuadRule rule = QuadRule::trapezoid,
                                              double svd_rel_tol = 1e-10) {
    if (trajs.empty() || windows < 1)
        throw InvariantViolation("baseline_identify: need trajectories and windows >= 1");
    const std::size_t M = dict_Y.size();
    std::vector<Eigen::RowVectorXcd> rows;
    std::vector<Complex> rhs;
    for (const auto& traj : trajs) {
        const auto& g = traj.samples();
        const std::size_t n = g.size() - 1;
        for (int k = 0; k < windows; ++k) {
            const std::size_t i0 = (n * std::size_t(k)) / std::size_t(windows);
            const std::size_t i1 = (n * std::size_t(k + 1)) / std::size_t(windows);
            if (i1 - i0 + 1 < 3)
                throw BadWindowCount("baseline_identify: a window has fewer than 3 samples");
            Eigen::RowVectorXcd row(M);
            std::vector<Complex> vals(i1 - i0 + 1);
            for (std::size_t i = 0; i < M; ++i) {
                for (std::size_t s = i0; s <= i1; ++s) vals[s - i0] = dict_Y[i](g[s]);
                row(i) = integrate(vals, traj.dt(), rule);
            }
            rows.push_back(row);
            rhs.push_back(g[i1] - g[i0]);
        }
    }
    Eigen::MatrixXcd A(rows.size(), M);
    Eigen::VectorXcd y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        A.row(r) = rows[r];
        y(r) = rhs[r];
    }

    IdentificationResult res;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::VectorXcd coeff = svd.matrixU().adjoint() * y;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (smax > 0.0 && sv(i) > svd_rel_tol * smax) {
            coeff(i) /= sv(i);
            ++res.rank;
        } else {
            coeff(i) = 0.0;
        }
        res.singular_values.push_back(sv(i));
    }
    res.theta = svd.matrixV() * coeff;
    const double ynorm = y.norm();
    res.residual = ynorm > 0.0 ? (A * res.theta - y).norm() / ynorm : 0.0;
    res.estimator = "baseline";
    return res;
}

/// Reconstructed symbol f_est(z) = (sum_i theta_i Z_i(z)) / P(z); the zeros
/// of B are the poles of the estimate and are guarded.
inline Complex reconstruct_f(const BlaschkeProduct& B, const Dictionary& dict,
                             const Eigen::VectorXcd& theta, Complex z) {
    if (B.min_distance_to_zero(z) < 1e-8)
        throw NearPole("reconstruct_f: evaluation at a reconstructed pole");
    std::vector<Complex> terms(dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i) terms[i] = theta(Eigen::Index(i)) * dict[i](z);
    return pairwise_sum(std::span<const Complex>(terms)) / B.pshift(z).value;
}

struct ModelErrorReport {
    double sup = 0.0;
    double rms = 0.0;
};

template <typename F1, typename F2>
ModelErrorReport model_error(F1&& f_true, F2&& f_est, std::span<const Complex> grid) {
    ModelErrorReport rep;
    double sq = 0.0;
    for (const auto& z : grid) {
        const double e = std::abs(f_true(z) - f_est(z));
        rep.sup = std::max(rep.sup, e);
        sq += e * e;
    }
    rep.rms = grid.empty() ? 0.0 : std::sqrt(sq / double(grid.size()));
    return rep;
}

}  // namespace hardyid
