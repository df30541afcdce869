#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace blax {

/// One verified identity: the worst residual seen and the bound it must meet.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string witness;
};

class Report {
 public:
  /// Record a residual; NaN residuals always fail.
  Check& add(std::string name, double residual, double tolerance,
             std::string witness = {}) {
    Check c;
    c.name = std::move(name);
    c.residual = residual;
    c.tolerance = tolerance;
    c.pass = std::isfinite(residual) && residual <= tolerance;
    c.witness = std::move(witness);
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  /// Record a boolean outcome (residual 0 on success, 1 on failure).
  Check& add_flag(std::string name, bool ok, std::string witness = {}) {
    return add(std::move(name), ok ? 0.0 : 1.0, 0.5, std::move(witness));
  }

  void merge(const Report& other, const std::string& prefix = {}) {
    for (Check c : other.checks_) {
      c.name = prefix + c.name;
      checks_.push_back(std::move(c));
    }
  }

  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(),
                       [](const Check& c) { return c.pass; });
  }

  const std::vector<Check>& checks() const { return checks_; }
  std::vector<Check>& checks() { return checks_; }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks_) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  void sort_by_name() {
    std::stable_sort(checks_.begin(), checks_.end(),
                     [](const Check& a, const Check& b) { return a.name < b.name; });
  }

 private:
  std::vector<Check> checks_;
};

/// Tracks the maximum residual and the point where it occurred.
class MaxResidual {
 public:
  void observe(double residual, const std::string& witness) {
    if (worse(residual)) {
      value_ = residual;
      witness_ = witness;
      seen_ = true;
    }
  }
  template <typename WitnessFn>
  void observe_lazy(double residual, WitnessFn&& witness) {
    if (worse(residual)) {
      value_ = residual;
      witness_ = witness();
      seen_ = true;
    }
  }
  double value() const { return value_; }
  const std::string& witness() const { return witness_; }

 private:
  // A NaN residual sticks once recorded.
  bool worse(double residual) const {
    if (!seen_) return true;
    if (std::isnan(value_)) return false;
    return std::isnan(residual) || residual > value_;
  }

  double value_ = 0.0;
  std::string witness_;
  bool seen_ = false;
};

}  // namespace blax
