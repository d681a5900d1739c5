#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "indefspec/config.hpp"
#include "indefspec/fd_oracle.hpp"
#include "indefspec/modes.hpp"
#include "indefspec/numerics.hpp"
#include "indefspec/secular.hpp"
#include "indefspec/spectrum.hpp"

namespace indefspec {

enum class ValidationLevel { Quick, Full };

struct CheckResult {
    std::string id;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = std::numeric_limits<double>::infinity();
};

/// Problem sizes for one validation level.
struct ValidationPlan {
    int gap_n_max = 5;
    int symmetry_n_max = 5;
    int symmetry_m_max = 10;
    std::vector<int> oracle_n{1, 2};
    int oracle_m_max = 3;
    std::vector<int> oracle_grids{400, 800, 1600};
    int modes_n_max = 3;
    int modes_m_max = 2;
    int accumulation_n_max = 5;

    static ValidationPlan for_level(ValidationLevel level) {
        ValidationPlan plan;
        if (level == ValidationLevel::Quick) {
            plan.gap_n_max = 2;
            plan.symmetry_n_max = 2;
            plan.oracle_n = {1, 2};
            plan.oracle_grids = {200, 400, 800};
            plan.modes_n_max = 2;
            plan.accumulation_n_max = 2;
        }
        return plan;
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

template <class Body>
CheckResult timed(std::string id, std::string name, double budget, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result;
    try {
        result = body();
    } catch (const std::exception& e) {
        result.passed = false;
        result.measured = std::numeric_limits<double>::quiet_NaN();
        result.detail = std::string("exception: ") + e.what();
    }
    result.id = std::move(id);
    result.name = std::move(name);
    result.budget_seconds = budget;
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline CheckResult at_most(double measured, double threshold, std::string detail = {}) {
    return {"", "", measured <= threshold, measured, threshold, std::move(detail)};
}

inline CheckResult at_least(double measured, double threshold, std::string detail = {}) {
    return {"", "", measured >= threshold, measured, threshold, std::move(detail)};
}

// Independent closed form for F'(0).
inline double closed_form_F_prime_zero(int n) {
    const double c = n * kPi;
    const double ch = std::cosh(c);
    return (2.0 * c - std::sinh(2.0 * c)) / (2.0 * c * c * c * ch * ch);
}

// Negative roots of F found by sign scanning between its poles on lambda < 0,
// without reflecting positive roots. Returned in decreasing order (closest to 0 first).
inline std::vector<double> scan_negative_roots(TransverseIndex n, int count,
                                               const SolverConfig& config) {
    const double k2 = n.wavenumber_sq();
    const double shrink = 2.0 * config.pole_exclusion;
    auto f = [&](double x) { return eval_F(x, n, config.pole_exclusion); };
    std::vector<double> roots;
    double upper = -1e-6;
    for (int j = 0; static_cast<int>(roots.size()) < count && j < 10 * count + 10; ++j) {
        const double pole = -k2 - ((j + 0.5) * kPi) * ((j + 0.5) * kPi);
        auto found = scan_roots(f, pole + shrink, upper, 1000, 1e-8);
        std::sort(found.begin(), found.end(), std::greater<>());
        for (double r : found) {
            roots.push_back(r);
        }
        upper = pole - shrink;
    }
    if (static_cast<int>(roots.size()) > count) {
        roots.resize(count);
    }
    return roots;
}

inline std::vector<ModeSpec> mode_family(int n_max, int m_max, cplx delta,
                                         const SolverConfig& config) {
    std::vector<ModeSpec> specs;
    for (int n = 1; n <= n_max; ++n) {
        const auto roots = solve_unperturbed(TransverseIndex(n), m_max, config);
        for (const auto& e : roots) {
            if (delta == cplx(0.0, 0.0)) {
                specs.push_back(make_mode_spec(e, config));
            } else {
                specs.push_back(make_mode_spec(
                    continue_to_delta(e, delta, config.continuation_steps, config), config));
            }
        }
    }
    return specs;
}

inline double psi_prime_sup(const ModeSpec& spec, int points = 201) {
    double sup = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = -1.0 + 2.0 * i / (points - 1);
        sup = std::max(sup, std::abs(psi_prime_branch(spec, x, Side::Left)));
        sup = std::max(sup, std::abs(psi_prime_branch(spec, x, Side::Right)));
    }
    return sup;
}

inline constexpr double kInterfaceFdStep = 1e-4;

// |(1+delta) psi'(0+) + psi'(0-)| / ||psi'||, derivatives by one-sided
// fourth-order differences of each half's formula.
inline double interface_defect(const ModeSpec& spec) {
    auto right = [&](double x) { return psi_branch(spec, x, Side::Right); };
    auto left = [&](double x) { return psi_branch(spec, x, Side::Left); };
    const cplx d_plus = one_sided_derivative(right, 0.0, kInterfaceFdStep, +1);
    const cplx d_minus = one_sided_derivative(left, 0.0, kInterfaceFdStep, -1);
    return std::abs((1.0 + spec.delta) * d_plus + d_minus) / psi_prime_sup(spec);
}

struct ConvergenceCase {
    std::string label;
    ModeIndex index;
    std::vector<cplx> deltas;
};

}  // namespace detail

// Acceptance criteria -------------------------------------------------------

inline CheckResult check_zero_root() {
    return detail::timed("AC01", "zero is a root of F for n = 1..10", 1.0, [] {
        double worst = 0.0;
        for (int n = 1; n <= 10; ++n) {
            worst = std::max(worst, std::abs(eval_F(0.0, TransverseIndex(n))));
        }
        return detail::at_most(worst, 1e-13, "max |F(0)|");
    });
}

inline CheckResult check_closed_form_derivative() {
    return detail::timed("AC02", "F'(0) matches its closed form and is negative", 1.0, [] {
        double worst = 0.0;
        bool negative = true;
        for (int n = 1; n <= 10; ++n) {
            const double got = eval_F_prime(0.0, TransverseIndex(n));
            const double want = detail::closed_form_F_prime_zero(n);
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
            negative = negative && got < 0.0;
        }
        auto r = detail::at_most(worst, 1e-10, "max relative error");
        r.passed = r.passed && negative;
        if (!negative) r.detail += "; F'(0) not negative";
        return r;
    });
}

inline CheckResult check_spectral_gap(const ValidationPlan& plan) {
    return detail::timed("AC03", "no root of F in (-(n pi)^2, 0) u (0, (n pi)^2)", 5.0, [&] {
        constexpr int kPoints = 10000;
        long sign_changes = 0;
        for (int n = 1; n <= plan.gap_n_max; ++n) {
            const TransverseIndex idx(n);
            const double k2 = idx.wavenumber_sq();
            for (auto [lo, hi] : {std::pair{-k2 + 1e-6, -1e-6}, std::pair{1e-6, k2 - 1e-6}}) {
                double prev = eval_F(lo, idx);
                for (int i = 1; i < kPoints; ++i) {
                    const double x = lo + (hi - lo) * i / (kPoints - 1);
                    const double v = eval_F(x, idx);
                    if ((v > 0) != (prev > 0) || v == 0.0) ++sign_changes;
                    prev = v;
                }
            }
        }
        return detail::at_most(static_cast<double>(sign_changes), 0.0, "sign changes found");
    });
}

struct SymmetryOutcome {
    CheckResult symmetry;
    CheckResult simplicity;
};

inline SymmetryOutcome check_symmetry_and_simplicity(const ValidationPlan& plan,
                                                     const SolverConfig& config = {}) {
    double worst_mismatch = 0.0;
    double min_abs_derivative = std::numeric_limits<double>::infinity();
    double max_derivative = -std::numeric_limits<double>::infinity();
    std::string count_issue;
    auto symmetry = detail::timed(
        "AC04", "independently scanned negative roots mirror the positive ones", 10.0, [&] {
            for (int n = 1; n <= plan.symmetry_n_max; ++n) {
                const TransverseIndex idx(n);
                const auto roots = solve_unperturbed(idx, plan.symmetry_m_max, config);
                const auto negatives =
                    detail::scan_negative_roots(idx, plan.symmetry_m_max, config);
                if (static_cast<int>(negatives.size()) != plan.symmetry_m_max) {
                    count_issue = "scan found " + std::to_string(negatives.size()) +
                                  " negative roots for n=" + std::to_string(n);
                    worst_mismatch = std::numeric_limits<double>::infinity();
                    continue;
                }
                for (int m = 1; m <= plan.symmetry_m_max; ++m) {
                    const double positive =
                        roots[static_cast<std::size_t>(plan.symmetry_m_max + m)].value.real();
                    worst_mismatch =
                        std::max(worst_mismatch, std::abs(negatives[m - 1] + positive));
                }
                std::vector<double> all{0.0};
                for (const auto& e : roots) all.push_back(e.value.real());
                all.insert(all.end(), negatives.begin(), negatives.end());
                for (double r : all) {
                    const double d = eval_F_prime(r, idx);
                    min_abs_derivative = std::min(min_abs_derivative, std::abs(d));
                    max_derivative = std::max(max_derivative, d);
                }
            }
            return detail::at_most(worst_mismatch, 1e-10,
                                   count_issue.empty() ? "max |lambda_neg + lambda_pos|"
                                                       : count_issue);
        });
    CheckResult simplicity;
    simplicity.id = "AC05";
    simplicity.name = "every root is simple with F' < 0";
    simplicity.measured = min_abs_derivative;
    simplicity.threshold = 1e-8;
    simplicity.passed = min_abs_derivative > 1e-8 && max_derivative < 0.0;
    simplicity.detail = "min |F'| over roots; max F' = " + detail::fmt_double(max_derivative);
    simplicity.seconds = 0.0;
    simplicity.budget_seconds = 10.0;
    return {symmetry, simplicity};
}

inline CheckResult check_oracle_equivalence(const ValidationPlan& plan,
                                            const SolverConfig& config = {}) {
    return detail::timed("AC06", "finite-difference oracle converges at second order", 30.0, [&] {
        double worst_order_dev = 0.0;
        double worst_ratio = 0.0;  // error / allowed at finest grid
        bool orders_ok = true;
        std::ostringstream os;
        for (int n : plan.oracle_n) {
            const auto table = oracle_compare(TransverseIndex(n), -plan.oracle_m_max,
                                              plan.oracle_m_max, plan.oracle_grids, config);
            for (const auto& row : table) {
                const auto& finest = row.samples.back();
                const double allowed = std::max(1e-3, 1e-4 * std::abs(row.secular_value));
                worst_ratio = std::max(worst_ratio, finest.error / allowed);
                if (std::isinf(row.order)) {
                    continue;  // reproduced to the bisection resolution at every grid
                }
                const bool ok = row.order >= 1.7 && row.order <= 2.3;
                orders_ok = orders_ok && ok;
                worst_order_dev = std::max(worst_order_dev, std::abs(row.order - 2.0));
                if (!ok) {
                    os << " order(" << n << "," << row.index.m << ")=" << row.order;
                }
            }
        }
        CheckResult r = detail::at_most(worst_ratio, 1.0,
                                        "max finest-grid error / max(1e-3, 1e-4|lambda|); max "
                                        "|order-2| = " +
                                            detail::fmt_double(worst_order_dev) + os.str());
        r.passed = r.passed && orders_ok;
        return r;
    });
}

inline CheckResult check_normalization(const ValidationPlan& plan, const SolverConfig& config = {}) {
    return detail::timed("AC07", "closed-form normalization and 2D orthonormality", 20.0, [&] {
        double worst_norm = 0.0;
        for (cplx delta : {cplx(0.0, 0.0), cplx(0.1, 0.0), cplx(0.0, 0.05)}) {
            for (const auto& spec :
                 detail::mode_family(plan.modes_n_max, plan.modes_m_max, delta, config)) {
                const double norm =
                    integrate([&](double x) { return std::norm(psi(spec, x)); }, -1.0, 1.0,
                              config.quad_rel_tol)
                        .real();
                worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
            }
        }
        const auto specs =
            detail::mode_family(plan.modes_n_max, plan.modes_m_max, cplx(0.0, 0.0), config);
        double worst_gram = 0.0;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            for (std::size_t j = i; j < specs.size(); ++j) {
                const cplx ip = inner_product_2d(specs[i], specs[j], config.quad_rel_tol);
                const double want = i == j ? 1.0 : 0.0;
                worst_gram = std::max(worst_gram, std::abs(ip - want));
            }
        }
        CheckResult r = detail::at_most(worst_norm, 1e-8,
                                        "max |int |psi|^2 - 1|; max Gram defect = " +
                                            detail::fmt_double(worst_gram));
        r.passed = r.passed && worst_gram <= 1e-7;
        return r;
    });
}

inline CheckResult check_interface_conditions(const ValidationPlan& plan,
                                              const SolverConfig& config = {}) {
    return detail::timed("AC08", "transmission conditions at x = 0", 5.0, [&] {
        double worst = 0.0;
        for (cplx delta : {cplx(0.0, 0.0), cplx(0.1, 0.0), cplx(0.0, 0.05)}) {
            for (const auto& spec :
                 detail::mode_family(plan.modes_n_max, plan.modes_m_max, delta, config)) {
                worst = std::max(worst, detail::interface_defect(spec));
            }
        }
        return detail::at_most(worst, 1e-8, "max |(1+delta) psi'(0+) + psi'(0-)| / ||psi'||");
    });
}

inline CheckResult check_kernel_functions() {
    return detail::timed("AC09", "kernel functions: harmonic halves, traces match", 5.0, [] {
        constexpr double h = 1e-3;
        double worst_laplacian = 0.0;  // in units of (k pi)^4 h^2 sup|f|
        double worst_boundary = 0.0;
        double worst_trace = 0.0;
        for (int k = 1; k <= 3; ++k) {
            const double kp = k * kPi;
            const double sup = std::sinh(kp);
            auto f = [k](double x, double y) { return kernel_function(k, x, y); };
            for (double x : {-0.9, -0.6, -0.3, -0.05, 0.05, 0.3, 0.6, 0.9}) {
                for (double y : {0.1, 0.35, 0.5, 0.65, 0.9}) {
                    const double lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) -
                                        4.0 * f(x, y)) /
                                       (h * h);
                    worst_laplacian =
                        std::max(worst_laplacian, std::abs(lap) / (kp * kp * kp * kp * h * h * sup));
                }
            }
            for (int i = 0; i <= 16; ++i) {
                const double t = i / 16.0;
                for (double v : {f(-1.0, t), f(1.0, t), f(-1.0 + 2.0 * t, 0.0),
                                 f(-1.0 + 2.0 * t, 1.0)}) {
                    worst_boundary = std::max(worst_boundary, std::abs(v) / sup);
                }
            }
            for (double y : {0.2, 0.5, 0.8}) {
                auto right = [&](double x) { return std::sinh(kp * (1.0 - x)) * std::sin(kp * y); };
                auto left = [&](double x) { return std::sinh(kp * (1.0 + x)) * std::sin(kp * y); };
                // outward normals at x = 0: -d/dx on the right half, +d/dx on the left
                const double dn_plus = -one_sided_derivative(right, 0.0, 1e-4, +1);
                const double dn_minus = one_sided_derivative(left, 0.0, 1e-4, -1);
                const double scale = kp * std::cosh(kp);
                worst_trace = std::max(worst_trace, std::abs(dn_plus - dn_minus) / scale);
                worst_trace = std::max(worst_trace, std::abs(right(0.0) - left(0.0)) / sup);
            }
        }
        CheckResult r = detail::at_most(worst_laplacian, 0.2,
                                        "max |Delta_h f| / ((k pi)^4 h^2 sup f); boundary " +
                                            detail::fmt_double(worst_boundary) + ", traces " +
                                            detail::fmt_double(worst_trace));
        r.passed = r.passed && worst_boundary <= 1e-12 && worst_trace <= 1e-8;
        return r;
    });
}

inline CheckResult check_delta_convergence(const SolverConfig& config = {}) {
    return detail::timed("AC10", "eigenpairs converge linearly as delta -> 0", 15.0, [&] {
        const std::vector<double> magnitudes{1e-1, 1e-2, 1e-3};
        double worst_order_dev = 0.0;
        double worst_halving_dev = 0.0;
        bool monotone = true;
        for (int m : {1, 0}) {
            const ModeIndex index{1, m};
            const Eigenvalue seed = solve_mode(index, config);
            const ModeSpec base = make_mode_spec(seed, config);
            for (cplx unit : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
                std::vector<cplx> deltas;
                for (double s : magnitudes) deltas.push_back(s * unit);
                const auto rows = convergence_study(index, deltas, config);
                std::vector<ErrorSample> samples;
                double prev_err = std::numeric_limits<double>::infinity();
                double prev_psi = std::numeric_limits<double>::infinity();
                for (const auto& row : rows) {
                    const Eigenvalue e{index, row.delta, row.lambda_delta,
                                       std::abs(eval_H(row.lambda_delta, row.delta,
                                                       TransverseIndex(1))),
                                       {}, RootSource::Continuation};
                    const double psi_dist =
                        eigenfunction_sup_distance(make_mode_spec(e, config), base);
                    monotone = monotone && row.error < prev_err && psi_dist < prev_psi;
                    prev_err = row.error;
                    prev_psi = psi_dist;
                    samples.push_back({std::abs(row.delta), row.error});
                }
                // magnitudes already decrease, as richardson_order expects
                const double order = richardson_order(samples);
                worst_order_dev = std::max(worst_order_dev, std::abs(order - 1.0));
                const Eigenvalue half =
                    continue_to_delta(seed, 0.5e-3 * unit, config.continuation_steps, config);
                const double ratio = rows.back().error / std::abs(half.value - seed.value);
                worst_halving_dev = std::max(worst_halving_dev, std::abs(ratio - 2.0));
            }
        }
        CheckResult r = detail::at_most(worst_order_dev, 0.1,
                                        "max |order - 1|; max |halving ratio - 2| = " +
                                            detail::fmt_double(worst_halving_dev));
        r.passed = r.passed && monotone && worst_halving_dev <= 0.2;
        if (!monotone) r.detail += "; errors not monotone";
        return r;
    });
}

inline CheckResult check_compatibility_bound() {
    return detail::timed("AC11", "no exceptional solutions for |delta| = 0.38", 5.0, [] {
        double worst = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 64; ++j) {
            const cplx delta = std::polar(kMaxDelta, 2.0 * kPi * j / 64.0);
            for (int n = 1; n <= 20; ++n) {
                const auto r = compatibility_residuals(delta, TransverseIndex(n));
                worst = std::min({worst, std::abs(r.at_plus), std::abs(r.at_minus)});
            }
        }
        CheckResult r = detail::at_least(worst, 1e-2, "min residual over the circle");
        r.passed = worst > 1e-2;
        return r;
    });
}

inline CheckResult check_accumulation(const ValidationPlan& plan, const SolverConfig& config = {}) {
    return detail::timed("AC12", "eigenvalue counts grow without bound", 10.0, [&] {
        std::vector<long> counts;
        for (double bound : {1e2, 1e3, 1e4}) {
            counts.push_back(count_eigenvalues(plan.accumulation_n_max, bound, config));
        }
        const bool increasing = counts[0] < counts[1] && counts[1] < counts[2];
        std::string detail = "counts";
        for (long c : counts) detail += " " + std::to_string(c);
        CheckResult r = detail::at_least(static_cast<double>(counts[2] - counts[1]), 1.0, detail);
        r.passed = increasing;
        return r;
    });
}

// Further invariants ---------------------------------------------------------

inline CheckResult check_oddness() {
    return detail::timed("INV-odd", "F(-lambda) = -F(lambda)", 5.0, [] {
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> dist(-100.0, 100.0);
        double worst = 0.0;
        int done = 0;
        while (done < 1000) {
            const double x = dist(rng);
            const TransverseIndex n(1 + done % 5);
            try {
                const double a = eval_F(x, n);
                const double b = eval_F(-x, n);
                worst = std::max(worst, std::abs(a + b) / (1.0 + std::abs(a)));
                ++done;
            } catch (const Error&) {
                // near a pole; draw again
            }
        }
        return detail::at_most(worst, 1e-12, "max |F(-x)+F(x)|/(1+|F(x)|)");
    });
}

inline CheckResult check_branch_freeness() {
    return detail::timed("INV-branch", "g agrees across the branch cut of sqrt", 1.0, [] {
        double worst = 0.0;
        for (double re : {-50.0, -3.0, -0.5, -0.005}) {
            const cplx above(re, 1e-300);
            const cplx below(re, -1e-300);
            worst = std::max(worst, std::abs(eval_g(above) - eval_g(below)));
            const cplx a2(re, 1e-9);
            const cplx b2(re, -1e-9);
            worst = std::max(worst, std::abs(eval_g(a2) - std::conj(eval_g(b2))));
        }
        return detail::at_most(worst, 1e-14, "max discrepancy across the cut");
    });
}

inline CheckResult check_series_consistency() {
    return detail::timed("INV-series", "Maclaurin series matches closed form", 1.0, [] {
        double worst = 0.0;
        for (double r : {1.1e-3, 5e-3, 2e-2, 0.1, 0.5, 0.99}) {
            for (int j = 0; j < 16; ++j) {
                const cplx u = std::polar(r, 2.0 * kPi * j / 16.0);
                const cplx s = std::sqrt(u);
                const cplx closed = std::tan(s) / s;
                worst = std::max(worst, std::abs(detail::g_series(u) - closed) / std::abs(closed));
            }
        }
        return detail::at_most(worst, 1e-12, "max relative difference on the annulus");
    });
}

inline CheckResult check_derivative_consistency() {
    return detail::timed("INV-deriv", "F' agrees with central differences", 2.0, [] {
        double worst = 0.0;
        bool decreasing = true;
        for (int n = 1; n <= 3; ++n) {
            const TransverseIndex idx(n);
            auto f = [&](double t) { return eval_F(t, idx); };
            for (double x : {-40.0, -7.0, 0.0, 3.0, 15.0, 27.0, 60.0}) {
                const double exact = eval_F_prime(x, idx);
                for (double h : {1e-4, 1e-5}) {
                    worst = std::max(worst,
                                     std::abs(central_derivative(f, x, h) - exact) / std::abs(exact));
                }
                // below h ~ 1e-4 roundoff dominates, so the h^2 decay is checked above it
                decreasing = decreasing && std::abs(central_derivative(f, x, 1e-3) - exact) <
                                               std::abs(central_derivative(f, x, 1e-2) - exact);
            }
        }
        CheckResult r = detail::at_most(worst, 1e-6, "max relative difference");
        r.passed = r.passed && decreasing;
        if (!decreasing) r.detail += "; error does not shrink from h = 1e-2 to 1e-3";
        return r;
    });
}

inline CheckResult check_gap_positivity(const ValidationPlan& plan) {
    return detail::timed("INV-G", "G > 0 on (0, (n pi)^2)", 2.0, [&] {
        double smallest = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= plan.gap_n_max; ++n) {
            const TransverseIndex idx(n);
            const double k2 = idx.wavenumber_sq();
            for (int i = 0; i < 1000; ++i) {
                const double x = 1e-6 + (k2 - 2e-6) * i / 999.0;
                smallest = std::min(smallest, eval_G(x, idx));
            }
        }
        CheckResult r = detail::at_least(smallest, 0.0, "min G on the grid");
        r.passed = smallest > 0.0;
        return r;
    });
}

inline CheckResult check_reference_constant() {
    return detail::timed("INV-0.32", "reference constant 0.32 and the |delta| <= 0.38 bound", 1.0,
                         [] {
                             const double c = tanh_ratio_bound();
                             const double lower = (1.0 - kMaxDelta) /
                                                  ((1.0 + kMaxDelta) * (1.0 + kMaxDelta));
                             CheckResult r = detail::at_most(
                                 std::abs(c - 0.32), 0.005,
                                 "constant = " + detail::fmt_double(c) +
                                     ", (1-|d|)/(1+|d|)^2 at 0.38 = " + detail::fmt_double(lower));
                             r.passed = r.passed && lower > c;
                             return r;
                         });
}

inline CheckResult check_continuation_roundtrip(const SolverConfig& config = {}) {
    return detail::timed("INV-roundtrip", "continuing to delta and back recovers the seed", 5.0,
                         [&] {
                             double worst = 0.0;
                             for (int m : {-2, -1, 0, 1, 2}) {
                                 const Eigenvalue seed = solve_mode({1, m}, config);
                                 for (cplx d : {cplx(0.2, 0.0), cplx(0.0, 0.2), cplx(-0.1, 0.1)}) {
                                     const auto there = continue_to_delta(
                                         seed, d, config.continuation_steps, config);
                                     const auto back = continue_to_delta(
                                         there, 0.0, config.continuation_steps, config);
                                     worst = std::max(worst, std::abs(back.value - seed.value));
                                 }
                             }
                             return detail::at_most(worst, 1e-10, "max |lambda_back - lambda|");
                         });
}

inline CheckResult check_ode_residual(const ValidationPlan& plan, const SolverConfig& config = {}) {
    return detail::timed("INV-ode", "eigenfunctions solve the ODE on each half", 5.0, [&] {
        constexpr double h = 1e-3;
        double worst = 0.0;
        for (const auto& spec :
             detail::mode_family(plan.modes_n_max, plan.modes_m_max, 0.0, config)) {
            const double k2 = TransverseIndex(spec.index.n).wavenumber_sq();
            const double lambda = spec.lambda.real();
            double sup = 0.0;
            for (int i = 0; i <= 200; ++i) sup = std::max(sup, std::abs(psi(spec, -1.0 + i / 100.0)));
            auto p = [&](double x) { return psi(spec, x); };
            for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                const cplx right = -second_derivative_5pt(p, x, h) - (lambda - k2) * p(x);
                const cplx left = second_derivative_5pt(p, -x, h) - (lambda + k2) * p(-x);
                worst = std::max({worst, std::abs(right) / sup, std::abs(left) / sup});
            }
        }
        return detail::at_most(worst, 1e-6, "max residual / ||psi||");
    });
}

inline CheckResult check_reflection_symmetry() {
    return detail::timed("INV-reflect", "psi_{n,0} is even in x", 1.0, [] {
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const ModeSpec spec = make_mode_spec(solve_mode({n, 0}));
            for (int i = 0; i <= 50; ++i) {
                const double x = i / 50.0;
                worst = std::max(worst, std::abs(psi(spec, x) - psi(spec, -x)));
            }
        }
        return detail::at_most(worst, 1e-10, "max |psi(x) - psi(-x)|");
    });
}

inline CheckResult check_oracle_structure(const ValidationPlan& plan) {
    return detail::timed("INV-oracle", "oracle matrix: Sturm totals, indefiniteness, gap", 10.0,
                         [&] {
                             const int N = plan.oracle_grids.back();
                             const auto M = assemble(TransverseIndex(1), N);
                             const auto [lo, hi] = gershgorin_bounds(M);
                             const bool totals = sturm_count(M, lo - 1.0) == 0 &&
                                                 sturm_count(M, hi + 1.0) == M.size();
                             const auto window = eigenvalues_in_window(M, -100.0, 100.0);
                             const long negatives = std::count_if(
                                 window.begin(), window.end(), [](double v) { return v < -1.0; });
                             const long positives = std::count_if(
                                 window.begin(), window.end(), [](double v) { return v > 1.0; });
                             const double k2 = kPi * kPi;
                             const auto gap_right = eigenvalues_in_window(M, 0.5, k2 - 0.5);
                             const auto gap_left = eigenvalues_in_window(M, -k2 + 0.5, -0.5);
                             const double spurious =
                                 static_cast<double>(gap_right.size() + gap_left.size());
                             CheckResult r = detail::at_most(
                                 spurious, 0.0,
                                 "eigenvalues inside the gap; negatives " +
                                     std::to_string(negatives) + ", positives " +
                                     std::to_string(positives));
                             r.passed = r.passed && totals && negatives > 0 && positives > 0;
                             return r;
                         });
}

inline CheckResult check_mutation_sentinel(const ValidationPlan& plan) {
    return detail::timed("INV-mutation", "un-flipped interface flux is caught by the gap check",
                         5.0, [&] {
                             const int N = plan.oracle_grids.back();
                             const auto M =
                                 assemble(TransverseIndex(1), N, FluxCoupling::Unflipped);
                             const double k2 = kPi * kPi;
                             const auto right = eigenvalues_in_window(M, 0.5, k2 - 0.5);
                             const auto left = eigenvalues_in_window(M, -k2 + 0.5, -0.5);
                             const double spurious =
                                 static_cast<double>(right.size() + left.size());
                             return detail::at_least(spurious, 1.0,
                                                     "spurious gap eigenvalues in the mutant");
                         });
}

inline CheckResult check_quadrature_weights() {
    return detail::timed("INV-quad", "Gauss-Legendre weights sum to b - a", 1.0, [] {
        double worst = 0.0;
        for (int order = 1; order <= kQuadratureMaxOrder; order *= 2) {
            const auto rule = gauss_legendre_rule(order, -0.3, 1.7);
            double s = 0.0;
            for (double w : rule.weights) s += w;
            worst = std::max(worst, std::abs(s - 2.0));
        }
        return detail::at_most(worst, 1e-13, "max |sum w - (b - a)|");
    });
}

/// Every acceptance criterion followed by the remaining invariants.
inline std::vector<CheckResult> run_validation(ValidationLevel level,
                                               const SolverConfig& config = {}) {
    ValidationPlan plan = ValidationPlan::for_level(level);
    if (level == ValidationLevel::Full) {
        plan.oracle_grids = config.fd_grid_sizes;
    }
    std::vector<CheckResult> out;
    out.push_back(check_zero_root());
    out.push_back(check_closed_form_derivative());
    out.push_back(check_spectral_gap(plan));
    auto sym = check_symmetry_and_simplicity(plan, config);
    out.push_back(sym.symmetry);
    sym.simplicity.seconds = sym.symmetry.seconds;
    out.push_back(sym.simplicity);
    out.push_back(check_oracle_equivalence(plan, config));
    out.push_back(check_normalization(plan, config));
    out.push_back(check_interface_conditions(plan, config));
    out.push_back(check_kernel_functions());
    out.push_back(check_delta_convergence(config));
    out.push_back(check_compatibility_bound());
    out.push_back(check_accumulation(plan, config));

    out.push_back(check_oddness());
    out.push_back(check_branch_freeness());
    out.push_back(check_series_consistency());
    out.push_back(check_derivative_consistency());
    out.push_back(check_gap_positivity(plan));
    out.push_back(check_reference_constant());
    out.push_back(check_continuation_roundtrip(config));
    out.push_back(check_ode_residual(plan, config));
    out.push_back(check_reflection_symmetry());
    out.push_back(check_oracle_structure(plan));
    out.push_back(check_mutation_sentinel(plan));
    out.push_back(check_quadrature_weights());
    return out;
}

}  // namespace indefspec
