#pragma once

#include <complex>

#include "hardyid/blaschke.hpp"

namespace hardyid {

/// Szego kernel S(w, z) = 1 / (1 - conj(w) z). The first argument is the
/// conjugated slot throughout this header.
inline Complex szego(Complex w, Complex z) { return 1.0 / (1.0 - std::conj(w) * z); }

/// Mixed second derivative d^2 S / (d conj(w) dz) = (1 + conj(w) z) S^3.
inline Complex szego_mixed(Complex w, Complex z) {
    const Complex s = szego(w, z);
    return (1.0 + std::conj(w) * z) * s * s * s;
}

/// K_w^[j](z) = d^j/d conj(w)^j S(w, z) = j! z^j / (1 - conj(w) z)^{j+1};
/// pairing a function against it evaluates the j-th derivative at w.
inline Complex derivative_kernel(Complex w, int j, Complex z) {
    const Complex s = szego(w, z);
    Complex v = s;
    double fact = 1.0;
    for (int i = 1; i <= j; ++i) {
        fact *= double(i);
        v *= z * s;
    }
    return fact * v;
}

/// Reproducing kernel of the shifted subspace B^2 H^2:
/// K(w, z) = conj(P(w)) P(z) S(w, z) with P = B^2.
inline Complex restricted_kernel(const BlaschkeProduct& B, Complex w, Complex z) {
    return std::conj(B.pshift(w).value) * B.pshift(z).value * szego(w, z);
}

/// d/d conj(w) of restricted_kernel. The conjugate slot is differentiated as
/// a function of conj(w) with conjugated coefficients, so
/// d/d conj(w) conj(P(w)) = conj(P'(w)).
inline Complex restricted_kernel_dwbar(const BlaschkeProduct& B, Complex w, Complex z) {
    const PshiftValue pw = B.pshift(w);
    const Complex s = szego(w, z);
    return (std::conj(pw.derivative) + std::conj(pw.value) * z * s) * B.pshift(z).value * s;
}

/// Mixed derivative kappa(w, z) = d^2/(d conj(w) dz) of restricted_kernel;
/// the integrand of the trajectory Gram double integral.
inline Complex restricted_kernel_mixed(const BlaschkeProduct& B, Complex w, Complex z) {
    const PshiftValue pw = B.pshift(w);
    const PshiftValue pz = B.pshift(z);
    const Complex s = szego(w, z);
    const Complex s2 = s * s;
    return std::conj(pw.derivative) * pz.derivative * s +
           std::conj(pw.derivative) * pz.value * std::conj(w) * s2 +
           std::conj(pw.value) * pz.derivative * z * s2 +
           std::conj(pw.value) * pz.value * (1.0 + std::conj(w) * z) * s2 * s;
}

}  // namespace hardyid
