#pragma once

#include <string>
#include <vector>

namespace sqg {

enum class CheckStatus { Pass, Fail, Skip };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string witness;  // failure witness or skip reason
};

struct Report {
  std::vector<CheckResult> checks;

  void pass(const std::string& name) { checks.push_back({name, CheckStatus::Pass, ""}); }
  void fail(const std::string& name, const std::string& witness) {
    checks.push_back({name, CheckStatus::Fail, witness});
  }
  void skip(const std::string& name, const std::string& why) {
    checks.push_back({name, CheckStatus::Skip, why});
  }
  void check(bool ok, const std::string& name, const std::string& witness = "") {
    if (ok)
      pass(name);
    else
      fail(name, witness);
  }
  void merge(const Report& r, const std::string& prefix = "") {
    for (const auto& c : r.checks) checks.push_back({prefix + c.name, c.status, c.witness});
  }
  bool ok() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) ++n;
    return n;
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return &c;
    return nullptr;
  }
  std::string str() const {
    std::string s;
    for (const auto& c : checks) {
      s += (c.status == CheckStatus::Pass ? "pass  "
            : c.status == CheckStatus::Fail ? "FAIL  "
                                            : "skip  ");
      s += c.name;
      if (!c.witness.empty()) s += "  [" + c.witness + "]";
      s += "\n";
    }
    return s;
  }
};

}  // namespace sqg
