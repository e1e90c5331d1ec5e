#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dowg {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite: quadrature exactness, kernel normalization, weak
/// operator identities, a coercivity sample and constant-solution checks.
std::vector<SelftestCheck> run_selftest();

/// One "PASS name: detail" / "FAIL name: detail" line per check; returns
/// true when all passed.
bool print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks);

}  // namespace dowg
