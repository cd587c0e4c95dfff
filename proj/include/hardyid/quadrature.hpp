#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hardyid/errors.hpp"
#include "hardyid/types.hpp"

namespace hardyid {

/// Composite quadrature rule over a uniform grid. Trapezoid works for any
/// sample count >= 2; Simpson needs an odd count >= 3.
enum class QuadRule { trapezoid, simpson };

/// Deterministic pairwise reduction; the summation tree depends only on the
/// element count, so results are independent of any threading above it.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.empty()) return T{};
    if (v.size() <= 8) {
        T s = v[0];
        for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Quadrature weights (without the dt factor).
inline std::vector<double> quadrature_weights(std::size_t n, QuadRule rule) {
    if (rule == QuadRule::trapezoid) {
        if (n < 2) throw BadSampleCount("trapezoid rule needs at least 2 samples");
        std::vector<double> w(n, 1.0);
        w.front() = w.back() = 0.5;
        return w;
    }
    if (n < 3 || n % 2 == 0)
        throw BadSampleCount("Simpson rule needs an odd sample count >= 3");
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 2 < n; i += 2) {
        w[i] += 1.0 / 3.0;
        w[i + 1] += 4.0 / 3.0;
        w[i + 2] += 1.0 / 3.0;
    }
    return w;
}

/// Integral of uniformly sampled values with spacing dt.
inline Complex integrate(std::span<const Complex> values, double dt, QuadRule rule) {
    const auto w = quadrature_weights(values.size(), rule);
    std::vector<Complex> weighted(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) weighted[i] = w[i] * values[i];
    return pairwise_sum(std::span<const Complex>(weighted)) * dt;
}

inline Complex integrate(const std::vector<Complex>& values, double dt, QuadRule rule) {
    return integrate(std::span<const Complex>(values), dt, rule);
}

/// Tensor-product double integral over an S x S grid of samples.
inline Complex integrate2d(const Eigen::MatrixXcd& values, double dt, QuadRule rule) {
    const auto wr = quadrature_weights(values.rows(), rule);
    const auto wc = quadrature_weights(values.cols(), rule);
    std::vector<Complex> row_sums(values.rows());
    std::vector<Complex> buf(values.cols());
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) buf[c] = wc[c] * values(r, c);
        row_sums[r] = wr[r] * pairwise_sum(std::span<const Complex>(buf));
    }
    return pairwise_sum(std::span<const Complex>(row_sums)) * dt * dt;
}

}  // namespace hardyid
