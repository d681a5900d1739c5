#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "indefspec/config.hpp"
#include "indefspec/error.hpp"
#include "indefspec/numerics.hpp"
#include "indefspec/secular.hpp"
#include "indefspec/spectrum.hpp"

namespace indefspec {

/// Symmetric tridiagonal matrix on the interior nodes of a uniform grid.
struct TridiagonalMatrix {
    std::vector<double> diag;     ///< size N-1
    std::vector<double> offdiag;  ///< size N-2
    double h = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
};

/// How the flux coefficient treats the left half.
enum class FluxCoupling {
    SignFlipped,  ///< coefficient sgn(x): the indefinite operator
    Unflipped,    ///< coefficient 1 everywhere; used only as a mutation sentinel
};

/// Flux-form discretization of sgn(x) (-d^2/dx^2 + (n pi)^2) on (-1, 1) with
/// Dirichlet ends. Row i:
///   [-a_{i+1/2}(u_{i+1} - u_i) + a_{i-1/2}(u_i - u_{i-1})]/h^2 + (n pi)^2 s_i u_i
/// with a = sgn at cell midpoints and s_i = sgn(x_i), s = 0 at the interface node.
inline TridiagonalMatrix assemble(TransverseIndex n, int N,
                                  FluxCoupling coupling = FluxCoupling::SignFlipped) {
    if (N < 8 || N % 2 != 0) {
        throw Error(ErrorKind::InvalidGrid, "grid size must be even and >= 8");
    }
    const double h = 2.0 / N;
    const double inv_h2 = 1.0 / (h * h);
    const double k2 = n.wavenumber_sq();
    const int interface = N / 2;
    // midpoint i+1/2 lies left of the interface iff i < N/2
    auto flux = [&](int i) {
        if (coupling == FluxCoupling::Unflipped) {
            return 1.0;
        }
        return i < interface ? -1.0 : 1.0;
    };
    auto node_sign = [&](int i) { return i < interface ? -1.0 : (i == interface ? 0.0 : 1.0); };

    TridiagonalMatrix M;
    M.h = h;
    M.diag.resize(N - 1);
    M.offdiag.resize(N - 2);
    for (int i = 1; i <= N - 1; ++i) {
        M.diag[i - 1] = (flux(i) + flux(i - 1)) * inv_h2 + k2 * node_sign(i);
        if (i < N - 1) {
            M.offdiag[i - 1] = -flux(i) * inv_h2;
        }
    }
    return M;
}

/// Number of eigenvalues strictly below `shift`, from the pivot signs of the
/// LDL^T factorization of M - shift I. Zero pivots are nudged to tiny*|M|.
inline std::size_t sturm_count(const TridiagonalMatrix& M, double shift) {
    double scale = 0.0;
    for (double d : M.diag) scale = std::max(scale, std::abs(d));
    for (double e : M.offdiag) scale = std::max(scale, std::abs(e));
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);

    std::size_t count = 0;
    double pivot = 1.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        double p = M.diag[i] - shift;
        if (i > 0) {
            const double e = M.offdiag[i - 1];
            p -= e * e / pivot;
        }
        if (p == 0.0) {
            p = -tiny;
        }
        if (p < 0.0) {
            ++count;
        }
        pivot = p;
    }
    return count;
}

/// Gershgorin interval containing every eigenvalue.
inline std::pair<double, double> gershgorin_bounds(const TridiagonalMatrix& M) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < M.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(M.offdiag[i - 1]);
        if (i + 1 < M.size()) r += std::abs(M.offdiag[i]);
        lo = std::min(lo, M.diag[i] - r);
        hi = std::max(hi, M.diag[i] + r);
    }
    return {lo, hi};
}

inline constexpr double kSturmWidth = 1e-10;

/// Eigenvalues of M in (lo, hi], increasing, by Sturm-count bisection.
inline std::vector<double> eigenvalues_in_window(const TridiagonalMatrix& M, double lo, double hi,
                                                 double width = kSturmWidth) {
    if (!(lo < hi)) {
        throw Error(ErrorKind::DomainError, "window needs lo < hi");
    }
    // count of eigenvalues <= x
    auto at_most = [&](double x) {
        return sturm_count(M, std::nextafter(x, std::numeric_limits<double>::infinity()));
    };
    const std::size_t below_lo = at_most(lo);
    const std::size_t below_hi = at_most(hi);
    std::vector<double> values;
    values.reserve(below_hi - below_lo);
    for (std::size_t k = below_lo; k < below_hi; ++k) {
        // the (k+1)-th smallest eigenvalue lies in (a, b]
        double a = lo;
        double b = hi;
        while (b - a > width) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) {
                break;
            }
            if (at_most(mid) >= k + 1) {
                b = mid;
            } else {
                a = mid;
            }
        }
        values.push_back(0.5 * (a + b));
    }
    return values;
}

struct OracleSpectrum {
    int n = 1;
    double h = 0.0;
    std::vector<double> eigenvalues;
};

inline OracleSpectrum oracle_spectrum(TransverseIndex n, int N, double lo, double hi) {
    const TridiagonalMatrix M = assemble(n, N);
    return {n.value(), M.h, eigenvalues_in_window(M, lo, hi)};
}

struct OracleSample {
    int N = 0;
    double h = 0.0;
    double oracle_value = 0.0;
    double error = 0.0;
};

struct OracleModeComparison {
    ModeIndex index;
    double secular_value = 0.0;
    std::vector<OracleSample> samples;
    double order = 0.0;  ///< Richardson order; +inf when reproduced exactly
};

/// Errors at or below this are the bisection resolution, not discretization.
inline constexpr double kOracleExactFloor = 100.0 * kSturmWidth;

/// Compares the finite-difference eigenvalue nearest each secular root across
/// grid sizes and estimates the convergence order per mode.
inline std::vector<OracleModeComparison> oracle_compare(TransverseIndex n, int m_lo, int m_hi,
                                                        const std::vector<int>& grid_sizes,
                                                        const SolverConfig& config = {}) {
    if (m_lo > m_hi) {
        throw Error(ErrorKind::DomainError, "empty m range");
    }
    if (grid_sizes.size() < 2) {
        throw Error(ErrorKind::DegenerateInput, "need at least two grid sizes");
    }
    const int m_abs = std::max(std::abs(m_lo), std::abs(m_hi)) + 1;
    const auto roots = solve_unperturbed(n, m_abs, config);
    auto root_of = [&](int m) { return roots[static_cast<std::size_t>(m + m_abs)].value.real(); };

    std::vector<int> sizes = grid_sizes;
    std::sort(sizes.begin(), sizes.end());
    std::vector<TridiagonalMatrix> matrices;
    matrices.reserve(sizes.size());
    for (int N : sizes) matrices.push_back(assemble(n, N));

    std::vector<OracleModeComparison> out;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double target = root_of(m);
        const double gap = std::min(target - root_of(m - 1), root_of(m + 1) - target);
        const double radius = 0.25 * gap;
        OracleModeComparison cmp{{n.value(), m}, target, {}, 0.0};
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const auto found = eigenvalues_in_window(matrices[i], target - radius, target + radius);
            if (found.empty()) {
                throw Error(ErrorKind::NoConvergence,
                            "no oracle eigenvalue near " + detail::mode_label(n.value(), m));
            }
            const double nearest = *std::min_element(found.begin(), found.end(), [&](double a, double b) {
                return std::abs(a - target) < std::abs(b - target);
            });
            cmp.samples.push_back({sizes[i], matrices[i].h, nearest, std::abs(nearest - target)});
        }
        // coarse-to-fine ordering for the order estimate
        std::vector<ErrorSample> errors;
        bool exact = true;
        for (const auto& s : cmp.samples) {
            errors.push_back({s.h, s.error});
            exact = exact && s.error <= kOracleExactFloor;
        }
        cmp.order = exact ? std::numeric_limits<double>::infinity() : richardson_order(errors);
        out.push_back(std::move(cmp));
    }
    return out;
}

}  // namespace indefspec
