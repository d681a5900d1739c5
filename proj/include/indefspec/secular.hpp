#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "indefspec/error.hpp"

namespace indefspec {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultPoleExclusion = 1e-8;

/// Transverse mode number n >= 1; carries (n pi)^2.
class TransverseIndex {
public:
    explicit TransverseIndex(int n) : n_(n) {
        if (n < 1) {
            throw Error(ErrorKind::DomainError, "transverse index must be >= 1");
        }
    }

    [[nodiscard]] int value() const noexcept { return n_; }
    [[nodiscard]] double wavenumber() const noexcept { return n_ * kPi; }
    [[nodiscard]] double wavenumber_sq() const noexcept { return wavenumber() * wavenumber(); }

    friend bool operator==(TransverseIndex, TransverseIndex) = default;

private:
    int n_;
};

namespace detail {

inline constexpr int kTanSeriesTerms = 40;

// tan(x)/x = sum_k c_k x^(2k). From tan' = 1 + tan^2:
// (2k+1) c_k = sum_{j<k} c_j c_{k-1-j}, c_0 = 1.
constexpr std::array<double, kTanSeriesTerms> make_tan_series() {
    std::array<double, kTanSeriesTerms> c{};
    c[0] = 1.0;
    for (int k = 1; k < kTanSeriesTerms; ++k) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            s += c[j] * c[k - 1 - j];
        }
        c[k] = s / (2.0 * k + 1.0);
    }
    return c;
}

inline constexpr auto kTanSeries = make_tan_series();

inline constexpr double kSeriesRadius = 1e-2;
inline constexpr double kSeriesTermFloor = 1e-18;
inline constexpr double kSaturation = 350.0;

inline cplx g_series(cplx u) {
    cplx sum = 0.0;
    cplx power = 1.0;
    for (int k = 0; k < kTanSeriesTerms; ++k) {
        const cplx term = kTanSeries[k] * power;
        sum += term;
        if (std::abs(term) < kSeriesTermFloor) {
            break;
        }
        power *= u;
    }
    return sum;
}

inline cplx g_prime_series(cplx u) {
    cplx sum = 0.0;
    cplx power = 1.0;
    for (int k = 1; k < kTanSeriesTerms; ++k) {
        const cplx term = static_cast<double>(k) * kTanSeries[k] * power;
        sum += term;
        if (std::abs(term) < kSeriesTermFloor) {
            break;
        }
        power *= u;
    }
    return sum;
}

inline void check_pole(cplx u, double exclusion) {
    const double re = u.real();
    if (re <= 0.0) {
        return;
    }
    const long k0 = std::lround(std::sqrt(re) / kPi - 0.5);
    for (long k = std::max(0L, k0 - 1); k <= k0 + 1; ++k) {
        const double x = (static_cast<double>(k) + 0.5) * kPi;
        if (std::abs(u - x * x) < exclusion) {
            throw Error(ErrorKind::PoleProximity,
                        "argument within pole-exclusion radius of ((k+1/2)pi)^2, k=" +
                            std::to_string(k));
        }
    }
}

}  // namespace detail

/// g(u) = tan(sqrt u)/sqrt u, an entire function away from its poles at
/// u = ((k+1/2)pi)^2. Negative u gives tanh(sqrt(-u))/sqrt(-u).
inline cplx eval_g(cplx u, double pole_exclusion = kDefaultPoleExclusion) {
    detail::check_pole(u, pole_exclusion);
    if (std::abs(u) < detail::kSeriesRadius) {
        return detail::g_series(u);
    }
    if (u.imag() == 0.0) {
        const double x = u.real();
        if (x > 0.0) {
            const double s = std::sqrt(x);
            return {std::tan(s) / s, 0.0};
        }
        const double s = std::sqrt(-x);
        return {std::tanh(s) / s, 0.0};
    }
    const cplx s = std::sqrt(u);
    if (std::abs(s.imag()) > detail::kSaturation) {
        // tan saturates to +-i; g is even in s so the sign choice is consistent
        return cplx(0.0, s.imag() > 0 ? 1.0 : -1.0) / s;
    }
    return std::tan(s) / s;
}

/// dg/du = (1 - g + u g^2) / (2u), with the series near u = 0.
inline cplx eval_g_prime(cplx u, double pole_exclusion = kDefaultPoleExclusion) {
    detail::check_pole(u, pole_exclusion);
    if (std::abs(u) < detail::kSeriesRadius) {
        return detail::g_prime_series(u);
    }
    const cplx g = eval_g(u, pole_exclusion);
    return (1.0 - g + u * g * g) / (2.0 * u);
}

namespace detail {

inline double real_part_checked(cplx z) {
    if (std::abs(z.imag()) > 1e-12 * std::abs(z)) {
        throw Error(ErrorKind::DomainError, "real-input evaluation produced a complex value");
    }
    return z.real();
}

inline void check_delta(cplx delta) {
    if (!(std::abs(delta) < 1.0)) {
        throw Error(ErrorKind::DeltaOutOfRange, "|delta| must be < 1");
    }
}

}  // namespace detail

/// F(lambda) = tanh sqrt(lambda+k^2)/sqrt(lambda+k^2) - tan sqrt(lambda-k^2)/sqrt(lambda-k^2),
/// with k = n pi. Its zeros are the eigenvalues for transverse index n.
inline cplx eval_F(cplx lambda, TransverseIndex n, double pole_exclusion = kDefaultPoleExclusion) {
    const double k2 = n.wavenumber_sq();
    return eval_g(-(lambda + k2), pole_exclusion) - eval_g(lambda - k2, pole_exclusion);
}

inline double eval_F(double lambda, TransverseIndex n,
                     double pole_exclusion = kDefaultPoleExclusion) {
    return detail::real_part_checked(eval_F(cplx(lambda, 0.0), n, pole_exclusion));
}

inline cplx eval_F_prime(cplx lambda, TransverseIndex n,
                         double pole_exclusion = kDefaultPoleExclusion) {
    const double k2 = n.wavenumber_sq();
    return -eval_g_prime(-(lambda + k2), pole_exclusion) -
           eval_g_prime(lambda - k2, pole_exclusion);
}

inline double eval_F_prime(double lambda, TransverseIndex n,
                           double pole_exclusion = kDefaultPoleExclusion) {
    return detail::real_part_checked(eval_F_prime(cplx(lambda, 0.0), n, pole_exclusion));
}

/// Reduced form of F' valid only at a root of F.
inline cplx F_prime_at_root(cplx lambda, TransverseIndex n) {
    const double k2 = n.wavenumber_sq();
    const cplx t = eval_g(-(lambda + k2));  // tanh sqrt(w)/sqrt(w)
    return -t * t + k2 / (lambda * lambda - k2 * k2) * (t - 1.0);
}

/// H(lambda, delta) = (1+delta) g(-((1+delta)lambda + k^2)) - g(lambda - k^2).
inline cplx eval_H(cplx lambda, cplx delta, TransverseIndex n,
                   double pole_exclusion = kDefaultPoleExclusion) {
    detail::check_delta(delta);
    const double k2 = n.wavenumber_sq();
    const cplx q = 1.0 + delta;
    return q * eval_g(-(q * lambda + k2), pole_exclusion) - eval_g(lambda - k2, pole_exclusion);
}

/// dH/dlambda.
inline cplx eval_H_lambda(cplx lambda, cplx delta, TransverseIndex n,
                          double pole_exclusion = kDefaultPoleExclusion) {
    detail::check_delta(delta);
    const double k2 = n.wavenumber_sq();
    const cplx q = 1.0 + delta;
    return -q * q * eval_g_prime(-(q * lambda + k2), pole_exclusion) -
           eval_g_prime(lambda - k2, pole_exclusion);
}

/// dH/ddelta.
inline cplx eval_H_delta(cplx lambda, cplx delta, TransverseIndex n,
                         double pole_exclusion = kDefaultPoleExclusion) {
    detail::check_delta(delta);
    const double k2 = n.wavenumber_sq();
    const cplx q = 1.0 + delta;
    const cplx u = -(q * lambda + k2);
    return eval_g(u, pole_exclusion) - q * lambda * eval_g_prime(u, pole_exclusion);
}

/// Gap function G(lambda) = sqrt(lambda+k^2) coth sqrt(lambda+k^2) - sqrt(k^2-lambda) coth sqrt(k^2-lambda)
/// on [0, k^2). It vanishes at 0 and increases strictly.
inline double eval_G(double lambda, TransverseIndex n) {
    const double k2 = n.wavenumber_sq();
    if (!(lambda >= 0.0 && lambda < k2)) {
        throw Error(ErrorKind::DomainError, "G is defined on [0, (n pi)^2)");
    }
    const cplx plus = 1.0 / eval_g(cplx(-(lambda + k2), 0.0));
    const cplx minus = 1.0 / eval_g(cplx(-(k2 - lambda), 0.0));
    return detail::real_part_checked(plus - minus);
}

struct CompatibilityResiduals {
    cplx at_plus;   ///< residual for the exceptional value lambda = (n pi)^2
    cplx at_minus;  ///< residual for lambda = -(n pi)^2/(1+delta)
};

/// Residuals of the two conditions under which (n pi)^2 or -(n pi)^2/(1+delta)
/// would solve the perturbed secular equation.
inline CompatibilityResiduals compatibility_residuals(cplx delta, TransverseIndex n) {
    detail::check_delta(delta);
    const double k2 = n.wavenumber_sq();
    const cplx q = 1.0 + delta;
    const cplx r1 = eval_g(-(2.0 + delta) * k2) - 1.0 / q;
    const cplx r2 = eval_g(-((2.0 + delta) / q) * k2) - q;
    return {r1, r2};
}

/// (1/pi)(sinh 2pi + 1)/(cosh 2pi - 1): bound on |Re tanh z / z| for |Re z| >= pi.
inline double tanh_ratio_bound() {
    return (std::sinh(2 * kPi) + 1.0) / (std::cosh(2 * kPi) - 1.0) / kPi;
}

}  // namespace indefspec
