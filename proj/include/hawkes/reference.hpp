#pragma once

#include "hawkes/events.hpp"

#include <Eigen/Dense>

namespace hawkes::reference {

// Direct O(n^2) transcriptions of the cumulant estimators, kept serial and
// deliberately independent of the two-pointer kernels in cumulants.cpp.
// They serve as the oracle in tests and as the baseline in the benchmark.

Eigen::MatrixXd estimate_C_direct(const EventStream& stream, double W);

/// General third-cumulant estimator K_hat(i,j,k) by naive summation.
double estimate_K_direct(const EventStream& stream, double W, int i, int j, int k);

/// Matrix of K_hat(i,i,j) slices.
Eigen::MatrixXd estimate_Kc_direct(const EventStream& stream, double W);

} // namespace hawkes::reference
