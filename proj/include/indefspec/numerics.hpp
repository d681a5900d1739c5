#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "indefspec/error.hpp"

namespace indefspec {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = -1.0;
    double b = 1.0;
};

namespace detail {

// Gauss-Legendre on [-1, 1], nodes ascending. Newton on P_order using the
// three-term recurrence; the rule is mirrored so it is exactly symmetric.
inline QuadratureRule make_reference_rule(int order) {
    if (order == 1) {
        return QuadratureRule{{0.0}, {2.0}, -1.0, 1.0};
    }
    QuadratureRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node for the weight
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[order - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (order % 2 == 1) {
        rule.nodes[order / 2] = 0.0;
    }
    return rule;
}

inline const QuadratureRule& reference_rule(int order) {
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, make_reference_rule(order)).first;
    }
    return it->second;
}

}  // namespace detail

/// Gauss-Legendre rule with `order` points mapped onto (a, b).
inline QuadratureRule gauss_legendre_rule(int order, double a, double b) {
    if (order < 1) {
        throw Error(ErrorKind::DomainError, "quadrature order must be >= 1");
    }
    QuadratureRule rule = detail::reference_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    rule.a = a;
    rule.b = b;
    return rule;
}

struct QuadratureResult {
    std::complex<double> value;
    int order = 0;       ///< largest rule order used on any piece
    double l1_norm = 0;  ///< estimate of the integral of |f|
};

inline constexpr int kQuadratureStartOrder = 16;
inline constexpr int kQuadratureMaxOrder = 1024;

namespace detail {

template <class Fn>
QuadratureResult integrate_piece(Fn& f, double a, double b, double rel_tol) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto apply = [&](int order) {
        const QuadratureRule& ref = reference_rule(order);
        std::complex<double> sum = 0.0;
        double l1 = 0.0;
        for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
            const std::complex<double> v = f(mid + half * ref.nodes[i]);
            sum += ref.weights[i] * v;
            l1 += ref.weights[i] * std::abs(v);
        }
        return QuadratureResult{half * sum, order, std::abs(half) * l1};
    };
    QuadratureResult previous = apply(kQuadratureStartOrder);
    for (int order = 2 * kQuadratureStartOrder; order <= kQuadratureMaxOrder; order *= 2) {
        QuadratureResult current = apply(order);
        const double scale = std::max(std::abs(current.value), current.l1_norm);
        if (std::abs(current.value - previous.value) <= rel_tol * scale) {
            return current;
        }
        previous = current;
    }
    throw Error(ErrorKind::NoConvergence,
                "Gauss-Legendre doubling did not converge by order 1024");
}

}  // namespace detail

/// Order-doubling Gauss-Legendre integration of a real or complex integrand.
///
/// Successive estimates are compared relative to max(|I|, integral of |f|),
/// so integrals that cancel to zero (orthogonality checks) still terminate.
/// Intervals straddling 0 are split there, since the integrands of interest
/// are only continuous across the interface.
template <class Fn>
QuadratureResult integrate_with_info(Fn&& f, double a, double b, double rel_tol) {
    if (a < 0.0 && 0.0 < b) {
        QuadratureResult left = detail::integrate_piece(f, a, 0.0, rel_tol);
        QuadratureResult right = detail::integrate_piece(f, 0.0, b, rel_tol);
        return {left.value + right.value, std::max(left.order, right.order),
                left.l1_norm + right.l1_norm};
    }
    return detail::integrate_piece(f, a, b, rel_tol);
}

template <class Fn>
std::complex<double> integrate(Fn&& f, double a, double b, double rel_tol) {
    return integrate_with_info(std::forward<Fn>(f), a, b, rel_tol).value;
}

/// Tensor-product Gauss-Legendre over [ax, bx] x [ay, by] with the same order
/// in both directions, doubled until two estimates agree relative to the
/// integral of |f|. The x-interval is split at 0 like the 1D version.
template <class Fn>
QuadratureResult integrate_2d_with_info(Fn&& f, double ax, double bx, double ay, double by,
                                        double rel_tol) {
    std::vector<std::pair<double, double>> x_pieces;
    if (ax < 0.0 && 0.0 < bx) {
        x_pieces = {{ax, 0.0}, {0.0, bx}};
    } else {
        x_pieces = {{ax, bx}};
    }
    const double ym = 0.5 * (ay + by);
    const double yh = 0.5 * (by - ay);
    auto apply = [&](int order) {
        const QuadratureRule& ref = detail::reference_rule(order);
        std::complex<double> sum = 0.0;
        double l1 = 0.0;
        for (auto [a, b] : x_pieces) {
            const double xm = 0.5 * (a + b);
            const double xh = 0.5 * (b - a);
            for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                const double x = xm + xh * ref.nodes[i];
                for (std::size_t j = 0; j < ref.nodes.size(); ++j) {
                    const std::complex<double> v = f(x, ym + yh * ref.nodes[j]);
                    const double w = xh * yh * ref.weights[i] * ref.weights[j];
                    sum += w * v;
                    l1 += std::abs(w) * std::abs(v);
                }
            }
        }
        return QuadratureResult{sum, order, l1};
    };
    QuadratureResult previous = apply(kQuadratureStartOrder);
    for (int order = 2 * kQuadratureStartOrder; order <= kQuadratureMaxOrder / 4; order *= 2) {
        QuadratureResult current = apply(order);
        const double scale = std::max(std::abs(current.value), current.l1_norm);
        if (std::abs(current.value - previous.value) <= rel_tol * scale) {
            return current;
        }
        previous = current;
    }
    throw Error(ErrorKind::NoConvergence, "tensor Gauss-Legendre did not converge by order 256");
}

// Finite differences. Each returns the same scalar type as f.

template <class Fn>
auto central_derivative(Fn&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Fourth-order one-sided first derivative; direction +1 samples x, x+h, ..., x+4h.
template <class Fn>
auto one_sided_derivative(Fn&& f, double x, double h, int direction) {
    const double s = direction >= 0 ? h : -h;
    return (-25.0 * f(x) + 48.0 * f(x + s) - 36.0 * f(x + 2 * s) + 16.0 * f(x + 3 * s) -
            3.0 * f(x + 4 * s)) /
           (12.0 * s);
}

/// Five-point fourth-order second derivative.
template <class Fn>
auto second_derivative_5pt(Fn&& f, double x, double h) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) /
           (12.0 * h * h);
}

struct ErrorSample {
    double h;
    double error;
};

/// Least-squares slope of log(error) against log(h).
///
/// Any zero error means the quantity is reproduced exactly; the order is then
/// reported as +infinity.
inline double richardson_order(std::span<const ErrorSample> samples) {
    if (samples.size() < 2) {
        throw Error(ErrorKind::DegenerateInput, "need at least two (h, error) samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].h > 0) || samples[i].error < 0 || !std::isfinite(samples[i].error)) {
            throw Error(ErrorKind::DegenerateInput, "h must be positive and errors non-negative");
        }
        if (i > 0 && !(samples[i].h < samples[i - 1].h)) {
            throw Error(ErrorKind::DegenerateInput, "h must be strictly decreasing");
        }
    }
    if (std::any_of(samples.begin(), samples.end(),
                    [](const ErrorSample& s) { return s.error == 0.0; })) {
        return std::numeric_limits<double>::infinity();
    }
    double mx = 0, my = 0;
    for (const auto& s : samples) {
        mx += std::log(s.h);
        my += std::log(s.error);
    }
    mx /= static_cast<double>(samples.size());
    my /= static_cast<double>(samples.size());
    double sxy = 0, sxx = 0;
    for (const auto& s : samples) {
        const double dx = std::log(s.h) - mx;
        sxy += dx * (std::log(s.error) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// Bisects a sign change of f on [lo, hi] down to adjacent doubles.
template <class Fn>
double bisect(Fn&& f, double lo, double hi, double width_tol = 0.0) {
    double flo = f(lo);
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= width_tol) {
            break;
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            return mid;
        }
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Sign-change scan of a real function over `panels` equal panels of [lo, hi].
///
/// Each sign change is bisected to full precision and kept only when |f| at the
/// limit point is below `root_abs_tol`; this discards sign changes across poles.
template <class Fn>
std::vector<double> scan_roots(Fn&& f, double lo, double hi, int panels, double root_abs_tol) {
    std::vector<double> roots;
    const double step = (hi - lo) / panels;
    double x0 = lo;
    double f0 = f(x0);
    for (int i = 1; i <= panels; ++i) {
        const double x1 = i == panels ? hi : lo + i * step;
        const double f1 = f(x1);
        if (f0 == 0.0) {
            roots.push_back(x0);
        } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
            const double r = bisect(f, x0, x1);
            if (std::abs(f(r)) < root_abs_tol) {
                roots.push_back(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0) {
        roots.push_back(x0);
    }
    return roots;
}

}  // namespace indefspec
