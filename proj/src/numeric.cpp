#include "ndpc/numeric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ndpc {

std::vector<double> gaussian(RngStream& rng, double mean, double var, std::size_t n) {
  if (!(var >= 0.0)) throw std::invalid_argument("gaussian: variance must be nonnegative");
  const double sd = std::sqrt(var);
  std::vector<double> out(n);
  for (auto& v : out) v = mean + sd * rng.next_gaussian();
  return out;
}

std::vector<double> uniform(RngStream& rng, double lo, double hi, std::size_t n) {
  if (!(lo <= hi)) throw std::invalid_argument("uniform: lo must not exceed hi");
  std::vector<double> out(n);
  const double width = hi - lo;
  for (auto& v : out) {
    v = lo + width * rng.next_uniform();
    // lo + width * u can round up to hi for u just below 1.
    if (v >= hi && hi > lo) v = std::nextafter(hi, lo);
  }
  return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double to_db(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("to_db: argument must be positive");
  return 10.0 * std::log10(x);
}

double from_db(double d) { return std::pow(10.0, d / 10.0); }

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace ndpc
