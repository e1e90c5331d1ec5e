#pragma once

namespace dowg::testing {

/// Fault-injection switches used by the selftest to prove that its checks
/// can fail. Never set outside tests.
struct Mutations {
  bool flip_inflow_sign = false;  // -<s.n u, v> on inflow becomes +<s.n u, v>
  bool tie_as_inflow = false;     // s.n == 0 classified as inflow
};

Mutations& mutations();

class ScopedMutation {
 public:
  explicit ScopedMutation(Mutations m) : saved_(mutations()) { mutations() = m; }
  ~ScopedMutation() { mutations() = saved_; }
  ScopedMutation(const ScopedMutation&) = delete;
  ScopedMutation& operator=(const ScopedMutation&) = delete;

 private:
  Mutations saved_;
};

}  // namespace dowg::testing
