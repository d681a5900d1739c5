#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "indefspec/config.hpp"
#include "indefspec/error.hpp"
#include "indefspec/numerics.hpp"
#include "indefspec/secular.hpp"

namespace indefspec {

/// (n, m): n >= 1 transverse, m in Z longitudinal; m = 0 is the zero eigenvalue.
struct ModeIndex {
    int n = 1;
    int m = 0;

    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

enum class RootSource { Bracketed, Symmetry, Continuation };

constexpr std::string_view to_string(RootSource s) noexcept {
    switch (s) {
        case RootSource::Bracketed: return "Bracketed";
        case RootSource::Symmetry: return "Symmetry";
        case RootSource::Continuation: return "Continuation";
    }
    return "Unknown";
}

struct Eigenvalue {
    ModeIndex index;
    cplx delta{0.0, 0.0};
    cplx value{0.0, 0.0};
    double residual = 0.0;    ///< |H(value, delta, n)|
    cplx derivative{0.0, 0.0};  ///< dH/dlambda at value
    RootSource source = RootSource::Bracketed;
};

struct Bracket {
    int n = 1;
    int m = 1;
    double lo = 0.0;
    double hi = 0.0;
};

namespace detail {

inline std::string mode_label(int n, int m) {
    return "(n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")";
}

inline double pole_shrink(const SolverConfig& config) { return 2.0 * config.pole_exclusion; }

inline bool has_sign_change(TransverseIndex n, double lo, double hi, const SolverConfig& config) {
    const double flo = eval_F(lo, n, config.pole_exclusion);
    const double fhi = eval_F(hi, n, config.pole_exclusion);
    return (flo > 0) != (fhi > 0) && flo != 0.0 && fhi != 0.0;
}

}  // namespace detail

/// Bracket for the m-th positive root. On the m-th branch of tan the root lies in
/// ((n pi)^2 + (m pi)^2, (n pi)^2 + ((m+1/2) pi)^2); the candidate is verified by
/// a sign check and, failing that, located by a 1024-panel scan between the
/// neighbouring poles.
inline Bracket bracket_root(TransverseIndex n, int m, const SolverConfig& config = {}) {
    if (m < 1) {
        throw Error(ErrorKind::DomainError, "positive-root brackets need m >= 1");
    }
    const double k2 = n.wavenumber_sq();
    const double shrink = detail::pole_shrink(config);
    const double branch_lo = k2 + (m * kPi) * (m * kPi);
    const double pole_hi = k2 + ((m + 0.5) * kPi) * ((m + 0.5) * kPi);
    Bracket candidate{n.value(), m, branch_lo + shrink, pole_hi - shrink};
    if (detail::has_sign_change(n, candidate.lo, candidate.hi, config)) {
        return candidate;
    }

    const double pole_lo = k2 + ((m - 0.5) * kPi) * ((m - 0.5) * kPi);
    const double lo = pole_lo + shrink;
    const double hi = pole_hi - shrink;
    constexpr int kPanels = 1 << 10;
    const double step = (hi - lo) / kPanels;
    double x0 = lo;
    double f0 = eval_F(x0, n, config.pole_exclusion);
    for (int i = 1; i <= kPanels; ++i) {
        const double x1 = i == kPanels ? hi : lo + i * step;
        const double f1 = eval_F(x1, n, config.pole_exclusion);
        if ((f0 > 0) != (f1 > 0)) {
            return Bracket{n.value(), m, x0, x1};
        }
        x0 = x1;
        f0 = f1;
    }
    throw Error(ErrorKind::BracketNotFound, "no sign change for " + detail::mode_label(n.value(), m));
}

inline std::vector<Bracket> bracket_positive_roots(TransverseIndex n, int m_max,
                                                   const SolverConfig& config = {}) {
    if (m_max < 1) {
        throw Error(ErrorKind::DomainError, "m_max must be >= 1");
    }
    std::vector<Bracket> brackets;
    brackets.reserve(m_max);
    for (int m = 1; m <= m_max; ++m) {
        brackets.push_back(bracket_root(n, m, config));
    }
    return brackets;
}

/// Bisection to the configured width, then safeguarded Newton polish. Newton
/// steps that leave the bracket or exceed half its width are replaced by
/// bisection; if the polish stalls, the root is finished by pure bisection.
inline double polish_root(const Bracket& bracket, const SolverConfig& config = {}) {
    const TransverseIndex n(bracket.n);
    auto f = [&](double x) { return eval_F(x, n, config.pole_exclusion); };
    double lo = bracket.lo;
    double hi = bracket.hi;
    double flo = f(lo);
    while (hi - lo > config.bracket_width_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 60; ++iter) {
        const double fx = f(x);
        if (fx == 0.0) {
            return x;
        }
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double dfx = eval_F_prime(x, n, config.pole_exclusion);
        double next = x - fx / dfx;
        const bool inside = next > lo && next < hi && std::isfinite(next);
        if (!inside || std::abs(next - x) > 0.5 * (hi - lo)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        x = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) &&
            std::abs(f(x)) < config.polish_residual_tol) {
            return x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            break;
        }
    }
    if (std::abs(f(x)) < config.polish_residual_tol) {
        return x;
    }
    // NewtonDivergence path: pure bisection from the original bracket.
    return bisect(f, bracket.lo, bracket.hi, 1e-13);
}

inline Eigenvalue make_unperturbed_record(ModeIndex index, double value, RootSource source,
                                          const SolverConfig& config = {}) {
    const TransverseIndex n(index.n);
    Eigenvalue e;
    e.index = index;
    e.value = value;
    e.residual = std::abs(eval_F(value, n, config.pole_exclusion));
    e.derivative = eval_F_prime(value, n, config.pole_exclusion);
    e.source = source;
    return e;
}

/// The (n, m) eigenvalue of the unperturbed operator.
inline Eigenvalue solve_mode(ModeIndex index, const SolverConfig& config = {}) {
    const TransverseIndex n(index.n);
    if (index.m == 0) {
        return make_unperturbed_record(index, 0.0, RootSource::Bracketed, config);
    }
    const int m = std::abs(index.m);
    const double root = polish_root(bracket_root(n, m, config), config);
    if (index.m > 0) {
        return make_unperturbed_record(index, root, RootSource::Bracketed, config);
    }
    return make_unperturbed_record(index, -root, RootSource::Symmetry, config);
}

/// The 2 m_max + 1 eigenvalues lambda_{n,-m_max} < ... < lambda_{n,m_max}.
/// Negative roots are reflections of the positive ones (F is odd).
inline std::vector<Eigenvalue> solve_unperturbed(TransverseIndex n, int m_max,
                                                 const SolverConfig& config = {}) {
    if (m_max < 0) {
        throw Error(ErrorKind::DomainError, "m_max must be >= 0");
    }
    std::vector<double> positive;
    positive.reserve(m_max);
    for (int m = 1; m <= m_max; ++m) {
        positive.push_back(polish_root(bracket_root(n, m, config), config));
    }
    std::vector<Eigenvalue> out;
    out.reserve(2 * m_max + 1);
    for (int m = m_max; m >= 1; --m) {
        out.push_back(make_unperturbed_record({n.value(), -m}, -positive[m - 1],
                                              RootSource::Symmetry, config));
    }
    out.push_back(make_unperturbed_record({n.value(), 0}, 0.0, RootSource::Bracketed, config));
    for (int m = 1; m <= m_max; ++m) {
        out.push_back(make_unperturbed_record({n.value(), m}, positive[m - 1],
                                              RootSource::Bracketed, config));
    }
    return out;
}

/// Positive roots of F not exceeding `lambda_max`, in increasing order.
inline std::vector<double> positive_roots_below(TransverseIndex n, double lambda_max,
                                                const SolverConfig& config = {}) {
    std::vector<double> roots;
    const double k2 = n.wavenumber_sq();
    for (int m = 1;; ++m) {
        if (k2 + (m * kPi) * (m * kPi) > lambda_max) {
            break;
        }
        const double r = polish_root(bracket_root(n, m, config), config);
        if (r > lambda_max) {
            break;
        }
        roots.push_back(r);
    }
    return roots;
}

/// Number of eigenvalues (counted per (n, m)) in [-bound, bound] with n <= n_max.
inline long count_eigenvalues(int n_max, double bound, const SolverConfig& config = {}) {
    long count = 0;
    for (int n = 1; n <= n_max; ++n) {
        count += 1 + 2 * static_cast<long>(positive_roots_below(TransverseIndex(n), bound, config).size());
    }
    return count;
}

struct SpectrumCluster {
    double value = 0.0;
    std::vector<ModeIndex> members;
};

/// Groups real eigenvalues from different (n, m) that coincide within `tol`.
inline std::vector<SpectrumCluster> group_spectrum(std::vector<Eigenvalue> records,
                                                   double tol = 1e-9) {
    std::sort(records.begin(), records.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.value.real() != b.value.real()) {
            return a.value.real() < b.value.real();
        }
        return a.index < b.index;
    });
    std::vector<SpectrumCluster> clusters;
    for (const auto& r : records) {
        const double v = r.value.real();
        if (!clusters.empty() && std::abs(v - clusters.back().value) <= tol) {
            clusters.back().members.push_back(r.index);
        } else {
            clusters.push_back({v, {r.index}});
        }
    }
    return clusters;
}

namespace detail {

struct NewtonOutcome {
    bool converged = false;
    cplx value;
};

// Complex Newton on lambda -> H(lambda, delta). Any pole hit counts as failure.
inline NewtonOutcome newton_H(cplx start, cplx delta, TransverseIndex n, double max_move,
                              const SolverConfig& config) {
    cplx x = start;
    try {
        for (int iter = 0; iter < 50; ++iter) {
            const cplx h = eval_H(x, delta, n, config.pole_exclusion);
            const cplx dh = eval_H_lambda(x, delta, n, config.pole_exclusion);
            if (dh == 0.0) {
                return {false, x};
            }
            const cplx step = h / dh;
            x -= step;
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) ||
                std::abs(x - start) > max_move) {
                return {false, x};
            }
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) {
                const double r = std::abs(eval_H(x, delta, n, config.pole_exclusion));
                return {r < config.residual_tol, x};
            }
        }
        const double r = std::abs(eval_H(x, delta, n, config.pole_exclusion));
        return {r < config.residual_tol, x};
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::PoleProximity) {
            return {false, x};
        }
        throw;
    }
}

}  // namespace detail

/// Tracks an eigenvalue from seed.delta to delta_target along a straight
/// segment: tangent predictor plus complex Newton corrector per step, halving
/// the step when the corrector fails or wanders.
inline Eigenvalue continue_to_delta(const Eigenvalue& seed, cplx delta_target, int steps,
                                    const SolverConfig& config = {}) {
    if (std::abs(delta_target) > kMaxDelta) {
        throw Error(ErrorKind::DeltaOutOfRange, "|delta| exceeds 0.38");
    }
    if (std::abs(seed.delta) > kMaxDelta) {
        throw Error(ErrorKind::DeltaOutOfRange, "seed |delta| exceeds 0.38");
    }
    if (steps < 1) {
        throw Error(ErrorKind::DomainError, "continuation needs at least one step");
    }
    const TransverseIndex n(seed.index.n);
    if (!(seed.residual < config.residual_tol)) {
        throw Error(ErrorKind::RootResidualTooLarge, "continuation seed is not a root");
    }

    cplx lambda = seed.value;
    double t = 0.0;
    double dt = 1.0 / steps;
    int halvings = 0;
    auto delta_at = [&](double s) { return seed.delta + s * (delta_target - seed.delta); };

    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        const cplx d0 = delta_at(t);
        const cplx d1 = delta_at(t_next);
        bool accepted = false;
        try {
            const cplx dh_dl = eval_H_lambda(lambda, d0, n, config.pole_exclusion);
            const cplx dh_dd = eval_H_delta(lambda, d0, n, config.pole_exclusion);
            const cplx tangent = -dh_dd / dh_dl * (d1 - d0);
            const cplx predicted = lambda + tangent;
            const double max_move = std::abs(tangent) + 1e-6 * (1.0 + std::abs(lambda));
            const auto outcome = detail::newton_H(predicted, d1, n, max_move, config);
            if (outcome.converged) {
                lambda = outcome.value;
                t = t_next;
                accepted = true;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PoleProximity) {
                throw;
            }
        }
        if (accepted) {
            halvings = 0;
            dt = std::min(dt * 2.0, 1.0 / steps);
        } else {
            if (++halvings > config.max_step_halvings) {
                throw Error(ErrorKind::ContinuationStall,
                            "continuation stalled for " +
                                detail::mode_label(seed.index.n, seed.index.m));
            }
            dt *= 0.5;
        }
    }

    Eigenvalue out;
    out.index = seed.index;
    out.delta = delta_target;
    out.value = lambda;
    out.residual = std::abs(eval_H(lambda, delta_target, n, config.pole_exclusion));
    out.derivative = eval_H_lambda(lambda, delta_target, n, config.pole_exclusion);
    out.source = RootSource::Continuation;
    if (!(out.residual < config.residual_tol)) {
        throw Error(ErrorKind::ContinuationStall, "continued root misses the residual tolerance");
    }
    return out;
}

struct ConvergenceRow {
    cplx delta;
    cplx lambda_delta;
    double error = 0.0;  ///< |lambda_delta - lambda_0|
};

/// Continues lambda_{n,m} to every delta in the sequence, each from delta = 0.
inline std::vector<ConvergenceRow> convergence_study(ModeIndex index,
                                                     const std::vector<cplx>& delta_sequence,
                                                     const SolverConfig& config = {}) {
    std::vector<ConvergenceRow> rows;
    if (delta_sequence.empty()) {
        return rows;
    }
    for (std::size_t i = 1; i < delta_sequence.size(); ++i) {
        if (std::abs(delta_sequence[i]) > std::abs(delta_sequence[i - 1])) {
            throw Error(ErrorKind::DomainError, "delta sequence must decrease in magnitude");
        }
    }
    const Eigenvalue seed = solve_mode(index, config);
    for (const cplx& delta : delta_sequence) {
        const Eigenvalue e = continue_to_delta(seed, delta, config.continuation_steps, config);
        rows.push_back({delta, e.value, std::abs(e.value - seed.value)});
    }
    return rows;
}

/// delta for the lossy family with coefficient -1 + i eta on the left half.
inline cplx delta_from_eta(double eta) { return cplx(0.0, eta) / cplx(1.0, -eta); }

/// delta for the real-contrast family with kappa = 1 + epsilon.
inline cplx delta_from_epsilon(double epsilon) { return {epsilon, 0.0}; }

}  // namespace indefspec
