#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ndpc/rng.hpp"

namespace ndpc {

/// A point in R^k for k in {1, 2}; stored inline, never heap-allocated.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

/// n i.i.d. draws from Normal(mean, var). var == 0 yields the constant mean.
std::vector<double> gaussian(RngStream& rng, double mean, double var, std::size_t n);

/// n i.i.d. draws from Uniform[lo, hi).
std::vector<double> uniform(RngStream& rng, double lo, double hi, std::size_t n);

/// Gaussian tail probability P(Z > x).
double q_function(double x);

double to_db(double x);
double from_db(double d);

/// Central-difference gradient of f at x with step h.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h);

}  // namespace ndpc
