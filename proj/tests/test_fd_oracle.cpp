#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "indefspec/fd_oracle.hpp"
#include "indefspec/modes.hpp"

using namespace indefspec;

namespace {

// Dense product M v for a tridiagonal matrix.
std::vector<double> multiply(const TridiagonalMatrix& M, const std::vector<double>& v) {
    std::vector<double> out(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) {
        double s = M.diag[i] * v[i];
        if (i > 0) s += M.offdiag[i - 1] * v[i - 1];
        if (i + 1 < M.size()) s += M.offdiag[i] * v[i + 1];
        out[i] = s;
    }
    return out;
}

}  // namespace

TEST(Assemble, ShapeAndInterfaceRow) {
    const auto M = assemble(TransverseIndex(1), 8);
    EXPECT_EQ(M.size(), 7u);
    EXPECT_EQ(M.offdiag.size(), 6u);
    EXPECT_DOUBLE_EQ(M.h, 0.25);
    // interface node x = 0 is row 3: flux signs cancel, zero-order term is 0
    EXPECT_EQ(M.diag[3], 0.0);
    EXPECT_DOUBLE_EQ(M.offdiag[2], 16.0);   // -a_{-1/2}/h^2 with a = -1
    EXPECT_DOUBLE_EQ(M.offdiag[3], -16.0);  // -a_{+1/2}/h^2 with a = +1
    EXPECT_DOUBLE_EQ(M.diag[0], -32.0 - kPi * kPi);
    EXPECT_DOUBLE_EQ(M.diag[6], 32.0 + kPi * kPi);
}

TEST(Assemble, RejectsBadGrids) {
    for (int N : {7, 6, 801}) {
        try {
            assemble(TransverseIndex(1), N);
            FAIL() << N;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidGrid);
        }
    }
}

TEST(Assemble, ConsistentWithZeroModeProfile) {
    // M applied to the exact lambda = 0 eigenfunction is O(h^2) small
    const ModeSpec s = make_mode_spec(solve_mode({1, 0}));
    std::vector<double> residual_norms;
    for (int N : {100, 200, 400}) {
        const auto M = assemble(TransverseIndex(1), N);
        std::vector<double> v(M.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = psi(s, -1.0 + (i + 1) * M.h).real();
        const auto r = multiply(M, v);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i + 1 == static_cast<std::size_t>(N / 2)) continue;  // interface row is O(h)
            worst = std::max(worst, std::abs(r[i]));
        }
        residual_norms.push_back(worst);
    }
    EXPECT_NEAR(residual_norms[0] / residual_norms[1], 4.0, 0.2);
    EXPECT_NEAR(residual_norms[1] / residual_norms[2], 4.0, 0.2);
}

TEST(SturmCount, TotalsAndIndefiniteness) {
    const auto M = assemble(TransverseIndex(1), 200);
    const auto [lo, hi] = gershgorin_bounds(M);
    EXPECT_EQ(sturm_count(M, lo - 1.0), 0u);
    EXPECT_EQ(sturm_count(M, hi + 1.0), M.size());
    // spectrum symmetric about 0, with 0 itself a simple eigenvalue
    EXPECT_EQ(sturm_count(M, -1e-6), (M.size() - 1) / 2);
    EXPECT_EQ(sturm_count(M, 1e-6), (M.size() + 1) / 2);
}

TEST(Eigenvalues, PlainDirichletLaplacian) {
    // a = 1, no zero-order term: eigenvalues (j pi / 2)^2 + O(h^2) on (-1, 1)
    const int N = 400;
    const double h = 2.0 / N;
    TridiagonalMatrix M;
    M.h = h;
    M.diag.assign(N - 1, 2.0 / (h * h));
    M.offdiag.assign(N - 2, -1.0 / (h * h));
    const auto ev = eigenvalues_in_window(M, 0.0, 30.0);
    ASSERT_EQ(ev.size(), 3u);
    for (int j = 1; j <= 3; ++j) {
        const double exact = std::pow(j * kPi / 2.0, 2);
        // discrete value is (4/h^2) sin^2(j pi h / 4)
        const double discrete = 4.0 / (h * h) * std::pow(std::sin(j * kPi * h / 4.0), 2);
        EXPECT_NEAR(ev[j - 1], discrete, 1e-9);
        // leading error term exact^2 h^2 / 12
        EXPECT_LT(std::abs(ev[j - 1] - exact), 1.01 * exact * exact * h * h / 12.0);
    }
}

TEST(Eigenvalues, ExactlyOneNearZero) {
    const auto M = assemble(TransverseIndex(1), 800);
    const auto ev = eigenvalues_in_window(M, -1.0, 1.0);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_LT(std::abs(ev[0]), 1e-8);
}

TEST(Eigenvalues, FirstPositiveMatchesSecularRoot) {
    const double root = solve_mode({1, 1}).value.real();
    std::vector<double> err;
    for (int N : {400, 800}) {
        const auto ev = eigenvalues_in_window(assemble(TransverseIndex(1), N), kPi * kPi, 40.0);
        ASSERT_EQ(ev.size(), 1u);
        err.push_back(std::abs(ev[0] - root));
    }
    EXPECT_LT(err[0], 1e-2);
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.3);
}

TEST(Eigenvalues, EmptyWindowAndBadWindow) {
    const auto M = assemble(TransverseIndex(1), 100);
    EXPECT_TRUE(eigenvalues_in_window(M, 1.0, 5.0).empty());
    EXPECT_THROW(eigenvalues_in_window(M, 2.0, 1.0), Error);
}

TEST(Eigenvalues, GapIsEmptyOnBothSides) {
    const auto M = assemble(TransverseIndex(1), 1600);
    EXPECT_TRUE(eigenvalues_in_window(M, 0.5, kPi * kPi - 0.5).empty());
    EXPECT_TRUE(eigenvalues_in_window(M, -kPi * kPi + 0.5, -0.5).empty());
}

TEST(Eigenvalues, UnflippedFluxPutsAnEigenvalueInTheGap) {
    const auto M = assemble(TransverseIndex(1), 1600, FluxCoupling::Unflipped);
    const auto left = eigenvalues_in_window(M, -kPi * kPi + 0.5, -0.5);
    const auto right = eigenvalues_in_window(M, 0.5, kPi * kPi - 0.5);
    EXPECT_GE(left.size() + right.size(), 1u);
}

TEST(OracleSpectrum, SortedAndTagged) {
    const auto s = oracle_spectrum(TransverseIndex(2), 400, -100.0, 100.0);
    EXPECT_EQ(s.n, 2);
    EXPECT_DOUBLE_EQ(s.h, 0.005);
    EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    EXPECT_FALSE(s.eigenvalues.empty());
}

TEST(OracleCompare, SecondOrderConvergence) {
    const auto table = oracle_compare(TransverseIndex(1), -2, 2, {400, 800, 1600});
    ASSERT_EQ(table.size(), 5u);
    for (const auto& row : table) {
        ASSERT_EQ(row.samples.size(), 3u);
        if (row.index.m == 0) {
            // the zero mode is reproduced exactly by the discrete operator
            EXPECT_TRUE(std::isinf(row.order));
            for (const auto& s : row.samples) EXPECT_LE(s.error, kOracleExactFloor);
            continue;
        }
        EXPECT_GE(row.order, 1.7) << "m=" << row.index.m;
        EXPECT_LE(row.order, 2.3) << "m=" << row.index.m;
        EXPECT_LT(row.samples.back().error, std::max(1e-3, 1e-4 * std::abs(row.secular_value)));
    }
}

TEST(OracleCompare, ZeroModeTendsToZero) {
    const auto table = oracle_compare(TransverseIndex(2), 0, 0, {200, 400});
    ASSERT_EQ(table.size(), 1u);
    EXPECT_LT(std::abs(table[0].samples.back().oracle_value), 1e-8);
}

TEST(OracleCompare, InputChecks) {
    EXPECT_THROW(oracle_compare(TransverseIndex(1), 1, 0, {200, 400}), Error);
    EXPECT_THROW(oracle_compare(TransverseIndex(1), 0, 1, {200}), Error);
}
