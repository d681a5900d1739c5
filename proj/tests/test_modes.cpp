#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "indefspec/modes.hpp"

using namespace indefspec;

namespace {

// Integrals of |psi|^2 for the unnormalized profile, computed beforehand with
// 40-digit adaptive quadrature.
constexpr double kNormInvSq_1_1 = 12385.596389669637255;
constexpr double kNormInvSq_1_2 = 1895308.2369938498420;
constexpr double kNormInvSq_2_1 = 22565629.666752498100;
constexpr double kNormInvSq_1_0 = 5550.0562729754150690;

ModeSpec mode(int n, int m, cplx delta = 0.0) {
    Eigenvalue e = solve_mode({n, m});
    if (delta != cplx(0.0, 0.0)) e = continue_to_delta(e, delta, 32);
    return make_mode_spec(e);
}

double norm_sq(const ModeSpec& s) {
    return integrate([&](double x) { return std::norm(psi(s, x)); }, -1.0, 1.0, 1e-12).real();
}

}  // namespace

TEST(Chi, ValuesAndNormalization) {
    EXPECT_EQ(chi(TransverseIndex(1), 0.0), 0.0);
    EXPECT_NEAR(chi(TransverseIndex(1), 0.5), std::sqrt(2.0), 1e-15);
    for (int n = 1; n <= 4; ++n) {
        const double s =
            integrate([&](double y) { return chi(TransverseIndex(n), y) * chi(TransverseIndex(n), y); },
                      0.0, 1.0, 1e-12)
                .real();
        EXPECT_NEAR(s, 1.0, 1e-13);
    }
    EXPECT_THROW(chi(TransverseIndex(1), 1.5), Error);
}

TEST(Normalization, ClosedFormMatchesReferenceIntegrals) {
    EXPECT_NEAR(unperturbed_norm_inverse_sq(1, solve_mode({1, 1}).value.real()), kNormInvSq_1_1,
                1e-10 * kNormInvSq_1_1);
    EXPECT_NEAR(unperturbed_norm_inverse_sq(1, solve_mode({1, 2}).value.real()), kNormInvSq_1_2,
                1e-10 * kNormInvSq_1_2);
    EXPECT_NEAR(unperturbed_norm_inverse_sq(2, solve_mode({2, 1}).value.real()), kNormInvSq_2_1,
                1e-10 * kNormInvSq_2_1);
    EXPECT_NEAR(unperturbed_norm_inverse_sq(1, 0.0), kNormInvSq_1_0, 1e-10 * kNormInvSq_1_0);
}

TEST(Normalization, GeneralFormReducesToUnperturbed) {
    for (int m : {-2, 0, 1, 3}) {
        const double lambda = solve_mode({2, m}).value.real();
        const double a = unperturbed_norm_inverse_sq(2, lambda);
        const double b = perturbed_norm_inverse_sq(2, lambda, 0.0);
        EXPECT_NEAR(a, b, 1e-11 * a) << "m=" << m;
    }
}

TEST(Normalization, QuadratureGivesUnitNorm) {
    EXPECT_NEAR(norm_sq(mode(1, 1)), 1.0, 1e-8);
    EXPECT_NEAR(norm_sq(mode(1, 0)), 1.0, 1e-8);
    EXPECT_NEAR(norm_sq(mode(1, 1, 0.1)), 1.0, 1e-8);
    EXPECT_NEAR(norm_sq(mode(1, 0, 0.1)), 1.0, 1e-8);
    EXPECT_NEAR(norm_sq(mode(2, -2, cplx(0.0, 0.05))), 1.0, 1e-8);
    EXPECT_NEAR(norm_sq(mode(1, 0, cplx(0.0, 0.05))), 1.0, 1e-8);
}

TEST(Normalization, PositiveRealConstant) {
    const auto s = mode(1, 1, cplx(0.03, 0.02));
    EXPECT_GT(s.normalization.real(), 0.0);
    EXPECT_EQ(s.normalization.imag(), 0.0);
}

TEST(Normalization, RejectsNonRoots) {
    try {
        normalization_constant({1, 1}, 20.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RootResidualTooLarge);
    }
}

TEST(Psi, KernelProfileAtZeroEigenvalue) {
    const auto s = mode(1, 0);
    // ratio to sinh(pi(1-|x|)) is one global constant
    const double c = psi(s, 0.3).real() / std::sinh(kPi * 0.7);
    for (double x : {-0.9, -0.5, -0.1, 0.0, 0.2, 0.6, 0.95}) {
        const cplx v = psi(s, x);
        EXPECT_NEAR(v.real(), c * std::sinh(kPi * (1.0 - std::abs(x))), 1e-13);
        EXPECT_EQ(v.imag(), 0.0);
    }
}

TEST(Psi, DirichletEndpoints) {
    for (int m : {-2, 0, 1, 2}) {
        for (cplx d : {cplx(0.0, 0.0), cplx(0.1, 0.0), cplx(0.0, 0.05)}) {
            const auto s = mode(2, m, d);
            EXPECT_LT(std::abs(psi(s, 1.0)), 1e-13);
            EXPECT_LT(std::abs(psi(s, -1.0)), 1e-13);
        }
    }
}

TEST(Psi, InterfaceConditionUnperturbed) {
    const auto s = mode(1, 1);
    auto right = [&](double x) { return psi_branch(s, x, Side::Right); };
    auto left = [&](double x) { return psi_branch(s, x, Side::Left); };
    const cplx dp = one_sided_derivative(right, 0.0, 1e-4, +1);
    const cplx dm = one_sided_derivative(left, 0.0, 1e-4, -1);
    EXPECT_LT(std::abs(dp + dm), 1e-10 * std::abs(dp));
    EXPECT_LT(std::abs(psi_prime_branch(s, 0.0, Side::Right) + psi_prime_branch(s, 0.0, Side::Left)),
              1e-12 * std::abs(dp));
}

TEST(Psi, InterfaceConditionPerturbed) {
    for (cplx d : {cplx(0.1, 0.0), cplx(0.0, 0.05), cplx(-0.2, 0.2)}) {
        const auto s = mode(1, 1, d);
        const cplx dp = psi_prime_branch(s, 0.0, Side::Right);
        const cplx dm = psi_prime_branch(s, 0.0, Side::Left);
        EXPECT_LT(std::abs((1.0 + d) * dp + dm), 1e-10 * std::abs(dp));
        EXPECT_LT(std::abs(psi_branch(s, 0.0, Side::Right) - psi_branch(s, 0.0, Side::Left)),
                  1e-12 * std::abs(dp));
    }
}

TEST(Psi, AnalyticDerivativeMatchesDifferences) {
    const auto s = mode(2, -1, cplx(0.05, 0.05));
    for (double x : {-0.7, -0.2, 0.3, 0.8}) {
        const cplx fd = central_derivative([&](double t) { return psi(s, t); }, x, 1e-5);
        EXPECT_LT(std::abs(psi_prime(s, x) - fd), 1e-7 * (1 + std::abs(fd)));
    }
}

TEST(Psi, SolvesTheOdeOnEachHalf) {
    for (int m : {-1, 0, 2}) {
        const auto s = mode(1, m);
        const double k2 = kPi * kPi;
        const double lambda = s.lambda.real();
        auto p = [&](double x) { return psi(s, x); };
        for (double x : {0.2, 0.5, 0.8}) {
            const cplx r = -second_derivative_5pt(p, x, 1e-3) - (lambda - k2) * p(x);
            const cplx l = second_derivative_5pt(p, -x, 1e-3) - (lambda + k2) * p(-x);
            EXPECT_LT(std::abs(r), 1e-6);
            EXPECT_LT(std::abs(l), 1e-6);
        }
    }
}

TEST(Psi, ZeroModeIsEven) {
    for (int n = 1; n <= 3; ++n) {
        const auto s = mode(n, 0);
        for (double x : {0.1, 0.4, 0.77, 1.0}) EXPECT_NEAR(std::abs(psi(s, x) - psi(s, -x)), 0.0, 1e-10);
    }
}

TEST(Psi, ContinuousInDelta) {
    // includes the zero mode, whose right-half argument sits on the branch cut
    for (int m : {0, 1, -1}) {
        const auto base = mode(1, m);
        double prev = 1e300;
        for (double d : {1e-1, 1e-2, 1e-3}) {
            for (cplx unit : {cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0)}) {
                const double dist = eigenfunction_sup_distance(mode(1, m, d * unit), base);
                EXPECT_LT(dist, 50.0 * d) << "m=" << m;
            }
            const double dist = eigenfunction_sup_distance(mode(1, m, cplx(0.0, d)), base);
            EXPECT_LT(dist, prev);
            prev = dist;
        }
    }
}

TEST(Psi, DomainChecked) {
    const auto s = mode(1, 1);
    EXPECT_THROW(psi(s, 1.0001), Error);
    EXPECT_THROW(f2d(s, 0.0, -0.1), Error);
}

TEST(F2d, VanishesOnTheBoundary) {
    const auto s = mode(1, 1, cplx(0.0, 0.02));
    for (int i = 0; i < 16; ++i) {
        const double t = i / 15.0;
        EXPECT_LT(std::abs(f2d(s, -1.0, t)), 1e-13);
        EXPECT_LT(std::abs(f2d(s, 1.0, t)), 1e-13);
        EXPECT_LT(std::abs(f2d(s, -1.0 + 2.0 * t, 0.0)), 1e-13);
        EXPECT_LT(std::abs(f2d(s, -1.0 + 2.0 * t, 1.0)), 1e-13);
    }
}

TEST(F2d, ContinuousAcrossInterface) {
    const auto s = mode(1, 1);
    for (double y : {0.25, 0.5}) EXPECT_NEAR(std::abs(f2d(s, 1e-9, y) - f2d(s, -1e-9, y)), 0.0, 1e-8);
}

TEST(F2d, UnitNormAndOrthonormality) {
    const auto a = mode(1, 1);
    EXPECT_NEAR(std::abs(inner_product_2d(a, a) - 1.0), 0.0, 1e-7);
    std::vector<ModeSpec> specs;
    for (int n = 1; n <= 3; ++n)
        for (int m = -2; m <= 2; ++m) specs.push_back(mode(n, m));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i; j < specs.size(); ++j) {
            const double want = i == j ? 1.0 : 0.0;
            EXPECT_LT(std::abs(inner_product_2d(specs[i], specs[j]) - want), 1e-7)
                << i << "," << j;
        }
    }
}

TEST(InnerProduct1d, ProfilesForOneNAreOrthonormal) {
    const auto a = mode(1, 1);
    const auto b = mode(1, 2);
    const auto c = mode(1, -1);
    EXPECT_LT(std::abs(inner_product_1d(a, b)), 1e-10);
    EXPECT_LT(std::abs(inner_product_1d(a, c)), 1e-10);
    EXPECT_NEAR(inner_product_1d(a, a).real(), 1.0, 1e-8);
}

TEST(KernelFunction, TracesAndHarmonicity) {
    for (int k = 1; k <= 3; ++k) {
        const double kp = k * kPi;
        for (double y : {0.3, 0.5}) {
            EXPECT_NEAR(kernel_function(k, 1e-15, y), kernel_function(k, -1e-15, y), 1e-9);
            EXPECT_NEAR(kernel_function(k, 0.0, y), std::sinh(kp) * std::sin(kp * y), 1e-9);
        }
        const double h = 1e-3;
        auto f = [k](double x, double y) { return kernel_function(k, x, y); };
        for (double x : {-0.5, 0.5}) {
            const double y = 0.4;
            const double lap =
                (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / (h * h);
            EXPECT_LT(std::abs(lap), kp * kp * kp * kp * h * h * std::sinh(kp) / 6.0);
        }
    }
    EXPECT_THROW(kernel_function(0, 0.0, 0.5), Error);
}
