#pragma once

// Property suite shared by the acceptance test binary and `genalg verify`.
// Each criterion is self-contained and deterministic for a given seed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace genalg::verify {

struct SuiteOptions {
  std::uint64_t seed = 20240611;
  int workers = 1;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

CriterionResult max_principle_battery(const SuiteOptions& o);
CriterionResult manufactured_convergence(const SuiteOptions& o);
CriterionResult estimate_uniformity(const SuiteOptions& o);
CriterionResult perturbation_bound(const SuiteOptions& o);
CriterionResult weak_residual(const SuiteOptions& o);
CriterionResult dirac_association(const SuiteOptions& o);
CriterionResult order_axioms(const SuiteOptions& o);
CriterionResult nonpositivity(const SuiteOptions& o);
CriterionResult scale_classification(const SuiteOptions& o);
CriterionResult well_definedness(const SuiteOptions& o);
CriterionResult uniqueness(const SuiteOptions& o);

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult(const SuiteOptions&)> run;
};

const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `ids` is empty); exceptions inside a
/// criterion turn into a failed result carrying the message.
std::vector<CriterionResult> run(const SuiteOptions& o, const std::vector<int>& ids = {});

/// "[PASS] 3 estimate_uniformity (1.2 s): detail"
std::string format_line(const CriterionResult& r);

}  // namespace genalg::verify
