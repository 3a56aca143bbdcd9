#include <gtest/gtest.h>

#include <cmath>

#include "masplit/errors.hpp"
#include "masplit/oracles.hpp"
#include "masplit/validation.hpp"

using namespace masplit;

TEST(Oracles, HyperbolaSearchAnalyticCases) {
  // (3,3) onto xy = 4: (2,2) at distance sqrt 2.
  const auto a = oracles::hyperbola_search(3.0, 3.0, 4.0);
  EXPECT_NEAR(a.distance, std::sqrt(2.0), 1e-10);
  // Feasible point: distance 0.
  EXPECT_NEAR(oracles::hyperbola_search(0.5, 2.0, 1.0).distance, 0.0, 1e-10);
}

TEST(Oracles, MatrixEntrySearchAgreesOnDiagonal) {
  const auto m = oracles::matrix_entry_search(Sym2::diag(2.0, 2.0), 4.0);
  EXPECT_NEAR(m.distance, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(m.m.det(), 4.0, 1e-12);
}

TEST(Validation, AllSuitesPassWithReducedSamples) {
  for (const auto& name : validation::suite_names()) {
    const validation::SuiteResult r = validation::run_suite(name, {123, 40});
    EXPECT_TRUE(r.passed()) << name;
    EXPECT_FALSE(r.checks.empty());
  }
  EXPECT_THROW(validation::run_suite("nope"), InvalidArgument);
}
