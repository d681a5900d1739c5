// Prints the lowest eigenvalues for n = 1, 2, follows lambda_{1,1} into the
// lossy family and compares a few of them with the finite-difference oracle.

#include <cstdio>

#include "indefspec/indefspec.hpp"

using namespace indefspec;

int main() {
    const SolverConfig config;

    for (int n = 1; n <= 2; ++n) {
        std::printf("n = %d\n", n);
        for (const auto& e : solve_unperturbed(TransverseIndex(n), 3, config)) {
            std::printf("  m = %+d  lambda = %+.12f  |F| = %.1e  F' = %.3e  (%s)\n", e.index.m,
                        e.value.real(), e.residual, e.derivative.real(),
                        std::string(to_string(e.source)).c_str());
        }
    }

    const Eigenvalue seed = solve_mode({1, 1}, config);
    std::printf("\nlambda_{1,1} along delta = i eta/(1 - i eta):\n");
    for (double eta : {0.1, 0.01, 0.001}) {
        const Eigenvalue e =
            continue_to_delta(seed, delta_from_eta(eta), config.continuation_steps, config);
        std::printf("  eta = %-6g lambda = %.10f %+.10fi  shift = %.3e\n", eta, e.value.real(),
                    e.value.imag(), std::abs(e.value - seed.value));
    }

    const ModeSpec mode = make_mode_spec(seed, config);
    std::printf("\npsi_{1,1}: N = %.6e, psi(-0.5) = %.6f, psi(0.5) = %.6f\n",
                mode.normalization.real(), psi(mode, -0.5).real(), psi(mode, 0.5).real());

    std::printf("\nfinite-difference oracle, n = 1:\n");
    for (const auto& row : oracle_compare(TransverseIndex(1), -2, 2, {400, 800, 1600}, config)) {
        std::printf("  m = %+d  secular %+.8f  N=1600 %+.8f  order %.3f\n", row.index.m,
                    row.secular_value, row.samples.back().oracle_value, row.order);
    }
    return 0;
}
