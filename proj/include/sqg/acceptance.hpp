#pragma once

// The acceptance suite: ten exact (zero-tolerance) criteria over the fixture
// registry, each reported as a single pass/fail line by the runner.

#include "sqg/report.hpp"

namespace sqg {

constexpr int kAcceptanceCriteria = 10;
Report acceptance_criterion(int k);        // 1-based
Report run_acceptance(std::size_t threads = 1);

}  // namespace sqg
