#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace maxent {

/// Which way an identity check may fail.
///   Equality:  pass iff |lhs - rhs| <= tol
///   LessEqual: pass iff lhs <= rhs + tol
///   GreaterEqual: pass iff lhs >= rhs - tol
enum class CheckKind { Equality, LessEqual, GreaterEqual };

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Equality: return "eq";
    case CheckKind::LessEqual: return "le";
    case CheckKind::GreaterEqual: return "ge";
  }
  return "?";
}

/// Outcome of one numerical identity or inequality check.
struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double tol = 0.0;
  bool pass = false;
  CheckKind kind = CheckKind::Equality;
  std::string mode;                                  // variant of the identity that was checked
  std::vector<std::pair<std::string, double>> terms;  // named intermediate quantities

  double term(const std::string& key) const {
    for (const auto& [k, v] : terms)
      if (k == key) return v;
    return std::nan("");
  }
};

inline IdentityReport make_report(std::string name, double lhs, double rhs, double tol,
                                  CheckKind kind = CheckKind::Equality) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = lhs - rhs;
  r.tol = tol;
  r.kind = kind;
  switch (kind) {
    case CheckKind::Equality: r.pass = std::abs(r.residual) <= tol; break;
    case CheckKind::LessEqual: r.pass = r.residual <= tol; break;
    case CheckKind::GreaterEqual: r.pass = r.residual >= -tol; break;
  }
  return r;
}

}  // namespace maxent
