#pragma once

#include <vector>

#include "indefspec/error.hpp"

namespace indefspec {

/// Tolerances and sizes shared by the solvers and the oracles.
struct SolverConfig {
    double residual_tol = 1e-12;       ///< max |H| accepted at a returned root
    double polish_residual_tol = 1e-13;  ///< target |F| for unperturbed roots
    double bracket_width_tol = 1e-8;   ///< bisection width before Newton polish
    double quad_rel_tol = 1e-10;
    double pole_exclusion = 1e-8;      ///< distance in u to ((k+1/2)pi)^2
    std::vector<int> fd_grid_sizes{400, 800, 1600};
    int continuation_steps = 32;
    int max_step_halvings = 12;

    void validate() const {
        if (!(residual_tol > 0) || !(polish_residual_tol > 0) || !(bracket_width_tol > 0) ||
            !(quad_rel_tol > 0) || !(pole_exclusion > 0)) {
            throw Error(ErrorKind::InvalidConfig, "tolerances must be positive");
        }
        if (continuation_steps < 1) {
            throw Error(ErrorKind::InvalidConfig, "continuation_steps must be >= 1");
        }
        if (max_step_halvings < 0) {
            throw Error(ErrorKind::InvalidConfig, "max_step_halvings must be >= 0");
        }
        for (int N : fd_grid_sizes) {
            if (N < 8 || N % 2 != 0) {
                throw Error(ErrorKind::InvalidConfig, "fd_grid_sizes must be even and >= 8");
            }
        }
    }
};

/// Largest |delta| for which exceptional solutions are provably absent.
inline constexpr double kMaxDelta = 0.38;

}  // namespace indefspec
