#include <algorithm>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "indefspec/validation.hpp"

using namespace indefspec;

TEST(Validation, QuickLevelPassesEverything) {
    const auto results = run_validation(ValidationLevel::Quick);
    for (const auto& r : results) {
        EXPECT_TRUE(r.passed) << r.id << " " << r.name << ": measured " << r.measured
                              << " threshold " << r.threshold << " (" << r.detail << ")";
    }
}

TEST(Validation, CatalogCoversCriteriaAndInvariants) {
    const auto results = run_validation(ValidationLevel::Quick);
    std::set<std::string> ids;
    for (const auto& r : results) ids.insert(r.id);
    EXPECT_EQ(ids.size(), results.size());
    for (int i = 1; i <= 12; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "AC%02d", i);
        EXPECT_TRUE(ids.count(id)) << id;
    }
    for (const char* id : {"INV-odd", "INV-branch", "INV-series", "INV-deriv", "INV-G", "INV-0.32",
                           "INV-roundtrip", "INV-ode", "INV-reflect", "INV-oracle", "INV-mutation",
                           "INV-quad"}) {
        EXPECT_TRUE(ids.count(id)) << id;
    }
}

TEST(Validation, ExceptionsBecomeFailures) {
    const auto r = detail::timed("X", "throws", 1.0, []() -> CheckResult {
        throw Error(ErrorKind::NoConvergence, "boom");
    });
    EXPECT_FALSE(r.passed);
    EXPECT_NE(r.detail.find("boom"), std::string::npos);
    EXPECT_EQ(r.id, "X");
}

TEST(Validation, ScannedNegativeRootsMirrorPositiveOnes) {
    const SolverConfig cfg;
    const auto neg = detail::scan_negative_roots(TransverseIndex(2), 4, cfg);
    const auto all = solve_unperturbed(TransverseIndex(2), 4, cfg);
    ASSERT_EQ(neg.size(), 4u);
    for (int m = 1; m <= 4; ++m) EXPECT_NEAR(neg[m - 1], -all[4 + m].value.real(), 1e-10);
}

TEST(Validation, ClosedFormDerivativeIsIndependent) {
    EXPECT_NEAR(detail::closed_form_F_prime_zero(1), -0.0313772759739932859, 1e-15);
}

TEST(Validation, PlansRespectLevelLimits) {
    const auto quick = ValidationPlan::for_level(ValidationLevel::Quick);
    EXPECT_LE(quick.gap_n_max, 2);
    EXPECT_LE(*std::max_element(quick.oracle_grids.begin(), quick.oracle_grids.end()), 800);
    const auto full = ValidationPlan::for_level(ValidationLevel::Full);
    EXPECT_EQ(full.gap_n_max, 5);
    EXPECT_EQ(full.oracle_grids.back(), 1600);
}
