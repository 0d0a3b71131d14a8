#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace fdpg {

struct Violation {
  std::string code;
  std::string message;
};

/// Accumulated findings of a validation pass; empty means valid.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  void add(std::string code, std::string message) {
    violations.push_back({std::move(code), std::move(message)});
  }
  bool has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }
  void merge(const ValidationReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  }
  std::string str() const {
    std::string out;
    for (const auto& v : violations) out += v.code + ": " + v.message + "\n";
    return out;
  }
};

}  // namespace fdpg
