#pragma once

#include "hmod/module.hpp"

#include <cstdint>
#include <map>
#include <variant>

namespace hmod {

enum class Verdict { pass, fail, hypotheses_not_met };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypotheses_not_met: return "hypotheses-not-met";
  }
  return "?";
}

using Witness = std::variant<AlgebraElement, ModuleVector, ModuleOperator>;

/// Outcome of one theorem predicate on one instance.
///
/// `residuals[name]` is compared against `tolerances[name]` when both exist;
/// `flags` records intermediate decisions (hypothesis checks, sub-verdicts).
struct VerificationReport {
  std::string theorem_id;
  Verdict verdict = Verdict::pass;
  std::map<std::string, double> residuals;
  std::map<std::string, double> tolerances;
  std::map<std::string, bool> flags;
  std::map<std::string, Witness> witnesses;
  std::uint64_t seed = 0;
  int instance = 0;

  bool passed() const { return verdict == Verdict::pass; }

  /// Record a residual against a tolerance; returns whether it is within.
  bool check(const std::string& name, double residual, double tolerance) {
    residuals[name] = residual;
    tolerances[name] = tolerance;
    return residual <= tolerance;
  }

  /// Pass iff every named flag given is true and every residual with a
  /// tolerance is within it.
  void settle(std::initializer_list<std::string> required_flags = {}) {
    bool ok = true;
    for (const auto& f : required_flags) ok = ok && flags.count(f) && flags.at(f);
    for (const auto& [name, tol] : tolerances) {
      auto it = residuals.find(name);
      if (it != residuals.end() && !(it->second <= tol)) ok = false;
    }
    verdict = ok ? Verdict::pass : Verdict::fail;
  }
};

}  // namespace hmod
