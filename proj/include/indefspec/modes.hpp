#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "indefspec/config.hpp"
#include "indefspec/error.hpp"
#include "indefspec/numerics.hpp"
#include "indefspec/secular.hpp"
#include "indefspec/spectrum.hpp"

namespace indefspec {

/// Everything needed to evaluate one eigenfunction.
struct ModeSpec {
    ModeIndex index;
    cplx delta{0.0, 0.0};
    cplx lambda{0.0, 0.0};
    cplx normalization{1.0, 0.0};
};

/// Which half of the rectangle a formula belongs to.
enum class Side { Left, Right };

namespace detail {

inline void check_x(double x) {
    if (!(x >= -1.0 && x <= 1.0)) {
        throw Error(ErrorKind::DomainError, "x must lie in [-1, 1]");
    }
}

inline void check_y(double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw Error(ErrorKind::DomainError, "y must lie in [0, 1]");
    }
}

// sin(sqrt(w) t)/sqrt(w), entire in w.
inline cplx sin_ratio(cplx w, double t) {
    const cplx z = w * (t * t);
    if (std::abs(z) < 1e-2) {
        // t * sum (-z)^k / (2k+1)!
        cplx sum = 0.0;
        cplx term = 1.0;
        for (int k = 0; k < 20; ++k) {
            sum += term;
            term *= -z / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            if (std::abs(term) < 1e-18) {
                break;
            }
        }
        return t * sum;
    }
    const cplx s = std::sqrt(w);
    return std::sin(s * t) / s;
}

// cos(sqrt(w) t), entire in w (even in the root).
inline cplx cos_root(cplx w, double t) { return std::cos(std::sqrt(w) * t); }

// sin(2z)/(4z) with its removable singularity; even in z.
inline cplx half_sinc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = 4.0 * z * z;
        return 0.5 * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sin(2.0 * z) / (4.0 * z);
}

// sinh(2z)/(4z); even in z.
inline cplx half_sinhc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = 4.0 * z * z;
        return 0.5 * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sinh(2.0 * z) / (4.0 * z);
}

inline double half_sinc(double a) { return half_sinc(cplx(a, 0.0)).real(); }
inline double half_sinhc(double b) { return half_sinhc(cplx(b, 0.0)).real(); }

struct ModeArguments {
    cplx w_plus;   ///< (1+delta) lambda + (n pi)^2, governs the left half
    cplx w_minus;  ///< lambda - (n pi)^2, governs the right half
};

inline ModeArguments mode_arguments(int n, cplx lambda, cplx delta) {
    const double k2 = TransverseIndex(n).wavenumber_sq();
    return {(1.0 + delta) * lambda + k2, lambda - k2};
}

// |sqrt(w_plus) sqrt(w_minus)|: folds the branch-dependent factor of the
// closed-form eigenfunction into its modulus.
inline double root_product_modulus(const ModeArguments& args) {
    return std::sqrt(std::abs(args.w_plus) * std::abs(args.w_minus));
}

}  // namespace detail

/// chi_n(y) = sqrt(2) sin(n pi y).
inline double chi(TransverseIndex n, double y) {
    detail::check_y(y);
    return std::sqrt(2.0) * std::sin(n.wavenumber() * y);
}

/// |N|^-2 from the unperturbed closed form. That expression is the analytic
/// continuation of the integral of psi^2 rather than |psi|^2; the two agree
/// up to sign for real lambda, hence the modulus.
inline double unperturbed_norm_inverse_sq(int n, double lambda) {
    const auto args = detail::mode_arguments(n, lambda, 0.0);
    const cplx sp = std::sqrt(args.w_plus);
    const cplx sm = std::sqrt(args.w_minus);
    const cplx sh = std::sinh(sp);
    const cplx sn = std::sin(sm);
    const cplx v = sh * sh * (0.5 - detail::half_sinc(sm)) +
                   sn * sn * (-0.5 + detail::half_sinhc(sp));
    return std::abs(v);
}

/// |N|^-2 from the general closed form (real and imaginary parts of the roots).
inline double perturbed_norm_inverse_sq(int n, cplx lambda, cplx delta) {
    const auto args = detail::mode_arguments(n, lambda, delta);
    const cplx sp = std::sqrt(args.w_plus);
    const cplx sm = std::sqrt(args.w_minus);
    const double sh = std::norm(std::sinh(sp));
    const double sn = std::norm(std::sin(sm));
    return sh * (detail::half_sinhc(sm.imag()) - detail::half_sinc(sm.real())) +
           sn * (-detail::half_sinc(sp.imag()) + detail::half_sinhc(sp.real()));
}

/// Positive real normalization constant for a verified root.
inline cplx normalization_constant(ModeIndex index, cplx lambda, cplx delta,
                                   const SolverConfig& config = {}) {
    const TransverseIndex n(index.n);
    const double residual = std::abs(eval_H(lambda, delta, n, config.pole_exclusion));
    if (!(residual < config.residual_tol)) {
        throw Error(ErrorKind::RootResidualTooLarge,
                    "lambda is not a root: |H| = " + std::to_string(residual));
    }
    const double inv_sq = delta == cplx(0.0, 0.0) && lambda.imag() == 0.0
                              ? unperturbed_norm_inverse_sq(index.n, lambda.real())
                              : perturbed_norm_inverse_sq(index.n, lambda, delta);
    return {1.0 / std::sqrt(inv_sq), 0.0};
}

inline ModeSpec make_mode_spec(const Eigenvalue& e, const SolverConfig& config = {}) {
    return {e.index, e.delta, e.value, normalization_constant(e.index, e.value, e.delta, config)};
}

/// The closed-form profile of one half, continued to any x. The branch-dependent
/// factor sqrt(w_plus) sqrt(w_minus) is replaced by its modulus, so the result
/// has the closed form's modulus and is continuous in (lambda, delta).
inline cplx psi_branch(const ModeSpec& spec, double x, Side side) {
    const auto args = detail::mode_arguments(spec.index.n, spec.lambda, spec.delta);
    const double scale = detail::root_product_modulus(args);
    cplx profile;
    if (side == Side::Right) {
        profile = detail::sin_ratio(-args.w_plus, 1.0) * detail::sin_ratio(args.w_minus, 1.0 - x);
    } else {
        profile = detail::sin_ratio(args.w_minus, 1.0) * detail::sin_ratio(-args.w_plus, 1.0 + x);
    }
    return spec.normalization * scale * profile;
}

/// psi_{n,m}(x) on [-1, 1].
inline cplx psi(const ModeSpec& spec, double x) {
    detail::check_x(x);
    return psi_branch(spec, x, x >= 0.0 ? Side::Right : Side::Left);
}

/// Analytic d psi/dx for one half.
inline cplx psi_prime_branch(const ModeSpec& spec, double x, Side side) {
    const auto args = detail::mode_arguments(spec.index.n, spec.lambda, spec.delta);
    const double scale = detail::root_product_modulus(args);
    cplx d;
    if (side == Side::Right) {
        d = -detail::sin_ratio(-args.w_plus, 1.0) * detail::cos_root(args.w_minus, 1.0 - x);
    } else {
        d = detail::sin_ratio(args.w_minus, 1.0) * detail::cos_root(-args.w_plus, 1.0 + x);
    }
    return spec.normalization * scale * d;
}

inline cplx psi_prime(const ModeSpec& spec, double x) {
    detail::check_x(x);
    return psi_prime_branch(spec, x, x >= 0.0 ? Side::Right : Side::Left);
}

/// f_{n,m}(x, y) = psi_{n,m}(x) chi_n(y).
inline cplx f2d(const ModeSpec& spec, double x, double y) {
    detail::check_x(x);
    detail::check_y(y);
    return psi(spec, x) * chi(TransverseIndex(spec.index.n), y);
}

/// Harmonic functions on each half spanning the kernel:
/// sinh(k pi (1 - |x|)) sin(k pi y).
inline double kernel_function(int k, double x, double y) {
    if (k < 1) {
        throw Error(ErrorKind::DomainError, "kernel index k must be >= 1");
    }
    detail::check_x(x);
    detail::check_y(y);
    const double kp = k * kPi;
    const double t = x > 0.0 ? 1.0 - x : 1.0 + x;
    return std::sinh(kp * t) * std::sin(kp * y);
}

/// <psi_a, psi_b> over (-1, 1).
inline cplx inner_product_1d(const ModeSpec& a, const ModeSpec& b, double rel_tol = 1e-10) {
    return integrate([&](double x) { return psi(a, x) * std::conj(psi(b, x)); }, -1.0, 1.0,
                     rel_tol);
}

/// <f_a, f_b> over the rectangle by tensor-product Gauss-Legendre quadrature.
inline cplx inner_product_2d(const ModeSpec& a, const ModeSpec& b, double rel_tol = 1e-10) {
    return integrate_2d_with_info(
               [&](double x, double y) { return f2d(a, x, y) * std::conj(f2d(b, x, y)); }, -1.0,
               1.0, 0.0, 1.0, rel_tol)
        .value;
}

/// sup over an equispaced grid on [-1, 1] of |psi_a - psi_b|.
inline double eigenfunction_sup_distance(const ModeSpec& a, const ModeSpec& b, int points = 201) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = -1.0 + 2.0 * i / (points - 1);
        worst = std::max(worst, std::abs(psi(a, x) - psi(b, x)));
    }
    return worst;
}

}  // namespace indefspec
