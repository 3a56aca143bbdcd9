#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace masplit::validation {

struct Check {
  std::string name;
  double value = 0.0;      // worst observed value
  double threshold = 0.0;  // pass iff value <= threshold
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;
  bool passed() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240501;
  int cases = 0;  // 0 selects the suite's default sample count
};

/// Pointwise projection vs. dense hyperbola search and direct matrix-entry
/// minimization; feasibility, spd, rotation equivariance, idempotence.
SuiteResult det_projection_suite(SuiteOptions options = {});
/// Shape-operator derivative formula vs. central finite differences; tangency at d = 0.
SuiteResult derivative_suite(SuiteOptions options = {});
/// Transform round trip, Parseval, and the projector laws of Pi_V.
SuiteResult spectral_suite(SuiteOptions options = {});
/// |X|_{3/2} <= |X|_0^{1/4} |X|_2^{3/4} on random fields.
SuiteResult interpolation_suite(SuiteOptions options = {});
/// Eigendecomposition reconstruction and the cofactor identity.
SuiteResult matfield_suite(SuiteOptions options = {});

std::vector<std::string> suite_names();
/// Throws InvalidArgument for an unknown name.
SuiteResult run_suite(const std::string& name, SuiteOptions options = {});

}  // namespace masplit::validation
