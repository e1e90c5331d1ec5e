#pragma once

#include <vector>

namespace dowg {

struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n-1.
Rule1D gauss_legendre(int n);

/// Same rule mapped to [0, 1].
Rule1D gauss_legendre_unit(int n);

}  // namespace dowg
