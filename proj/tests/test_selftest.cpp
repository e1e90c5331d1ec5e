#include <doctest.h>

#include <sstream>

#include "dowg/cli.hpp"
#include "dowg/mutations.hpp"
#include "dowg/selftest.hpp"

using namespace dowg;

namespace {

const SelftestCheck& find(const std::vector<SelftestCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::runtime_error("no check " + name);
}

}  // namespace

TEST_CASE("fresh build passes every check") {
  const auto checks = run_selftest();
  CHECK(checks.size() == 7);
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
  std::ostringstream out;
  CHECK(print_selftest(out, checks));
  CHECK(out.str().rfind("PASS ", 0) == 0);

  const char* argv[] = {"dowg", "selftest"};
  std::ostringstream o, e;
  CHECK(run_cli(2, argv, o, e) == exit_code::ok);
}

TEST_CASE("flipped inflow sign breaks coercivity") {
  testing::Mutations m;
  m.flip_inflow_sign = true;
  const testing::ScopedMutation guard(m);
  const auto checks = run_selftest();
  CHECK_FALSE(find(checks, "coercivity sample").passed);
  std::ostringstream out;
  CHECK_FALSE(print_selftest(out, checks));
  CHECK(out.str().find("FAIL coercivity sample") != std::string::npos);

  const char* argv[] = {"dowg", "selftest"};
  std::ostringstream o, e;
  CHECK(run_cli(2, argv, o, e) == exit_code::selftest_failed);
}

TEST_CASE("ties counted as inflow break the constant-solution check") {
  testing::Mutations m;
  m.tie_as_inflow = true;
  const testing::ScopedMutation guard(m);
  const auto checks = run_selftest();
  CHECK_FALSE(find(checks, "constant-solution residual").passed);
}

TEST_CASE("mutations are restored") {
  {
    testing::Mutations m;
    m.tie_as_inflow = true;
    const testing::ScopedMutation guard(m);
  }
  CHECK_FALSE(testing::mutations().tie_as_inflow);
  CHECK_FALSE(testing::mutations().flip_inflow_sign);
}
