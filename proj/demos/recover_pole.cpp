// Minimal end-to-end walkthrough: simulate zdot = 1/(z - a), assemble the
// trajectory Gram system for the shifted field, and read the pole location
// back off the leading series coefficient.

#include <cstdio>

#include "hardyid/identify.hpp"

using namespace hardyid;

int main() {
    const Complex a{0.2, 0.1};
    const RationalSymbol f(Polynomial{1.0}, Polynomial({-a, Complex{1.0, 0.0}}));
    const BlaschkeProduct B(f.poles());

    std::vector<Trajectory> trajs;
    std::vector<std::vector<Complex>> velocities;
    for (const Complex z0 : {Complex{0.5, 0.0}, Complex{0.0, 0.5}, Complex{-0.5, 0.0},
                             Complex{0.45, 0.35}, Complex{-0.45, -0.3}, Complex{0.35, -0.45}}) {
        auto sim = simulate_rk4(f, z0, 0.2, 1e-3);
        velocities.push_back(velocity_estimate(sim.trajectory));
        trajs.push_back(std::move(sim.trajectory));
    }

    const Dictionary dict = Dictionary::monomials(6);
    const GramSystem sys = assemble_system(B, dict, trajs, velocities, QuadRule::trapezoid,
                                           RhsEstimator::data_integral);
    const IdentificationResult res = solve(sys.G, sys.b);

    std::printf("rank %d, relative residual %.2e\n", res.rank, res.residual);
    std::printf("series coefficients of the shifted field:\n");
    for (Eigen::Index i = 0; i < res.theta.size(); ++i)
        std::printf("  theta[%ld] = %+.6f %+.6fi\n", long(i), res.theta(i).real(),
                    res.theta(i).imag());
    // the shifted field starts as -a + (1 - 2|a|^2) z + ...
    std::printf("pole estimate from -theta[0]: %+.6f %+.6fi (true %+.4f %+.4fi)\n",
                -res.theta(0).real(), -res.theta(0).imag(), a.real(), a.imag());

    const Complex probe{0.55, -0.3};
    std::printf("f_est(%.2f%+.2fi) = %.6f%+.6fi, f = %.6f%+.6fi\n", probe.real(), probe.imag(),
                reconstruct_f(B, dict, res.theta, probe).real(),
                reconstruct_f(B, dict, res.theta, probe).imag(), f(probe).real(),
                f(probe).imag());
    return 0;
}
