// Acceptance runner: one pass/fail line per criterion, nonzero exit on failure.
#include <cstdio>
#include <cstdlib>
#include <future>
#include <vector>

#include "sqg/acceptance.hpp"

int main(int argc, char** argv) {
  std::size_t threads = 4;
  if (const char* env = std::getenv("SQG_THREADS")) threads = std::strtoul(env, nullptr, 10);
  if (argc > 1) threads = std::strtoul(argv[1], nullptr, 10);
  static const char* names[] = {
      "axioms and derived identities", "unit laws",           "coherence",
      "classical restriction",         "closed-form checks",  "exactness",
      "box product and sigma",         "spectrum homotopy",   "quadratic and square rings",
      "cosymmetry",
  };
  bool all_ok = true;
  std::vector<sqg::Report> parts(sqg::kAcceptanceCriteria);
  if (threads <= 1) {
    for (int k = 1; k <= sqg::kAcceptanceCriteria; ++k)
      parts[k - 1] = sqg::acceptance_criterion(k);
  } else {
    std::vector<std::future<sqg::Report>> futs;
    for (int k = 1; k <= sqg::kAcceptanceCriteria; ++k)
      futs.push_back(std::async(std::launch::async, [k] { return sqg::acceptance_criterion(k); }));
    for (int k = 0; k < sqg::kAcceptanceCriteria; ++k) parts[k] = futs[k].get();
  }
  for (int k = 0; k < sqg::kAcceptanceCriteria; ++k) {
    const sqg::Report& r = parts[k];
    if (r.ok()) {
      std::printf("criterion %2d (%s): PASS (%zu checks)\n", k + 1, names[k], r.checks.size());
    } else {
      all_ok = false;
      std::printf("criterion %2d (%s): FAIL\n", k + 1, names[k]);
      for (const auto& c : r.checks)
        if (c.status == sqg::CheckStatus::Fail)
          std::printf("    FAIL %s [%s]\n", c.name.c_str(), c.witness.c_str());
    }
  }
  return all_ok ? 0 : 1;
}
