#include "ndpc/constellation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ndpc {

Constellation::Constellation(std::vector<Point> points, std::string name)
    : points_(std::move(points)), name_(std::move(name)) {
  if (points_.empty()) throw std::invalid_argument("Constellation: needs at least one point");
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 1 || dim_ > 2) throw std::invalid_argument("Constellation: dimension must be 1 or 2");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != dim_) throw std::invalid_argument("Constellation: mixed point dimensions");
    if (!points_[i].allFinite()) throw std::invalid_argument("Constellation: non-finite point");
    for (std::size_t j = 0; j < i; ++j)
      if (points_[i] == points_[j]) throw std::invalid_argument("Constellation: duplicate points");
  }
}

const Point& Constellation::point(std::size_t index) const {
  if (index >= points_.size()) throw std::out_of_range("Constellation: message index out of range");
  return points_[index];
}

double Constellation::average_power() const {
  double acc = 0.0;
  for (const auto& p : points_) acc += p.squaredNorm();
  return acc / static_cast<double>(points_.size());
}

Constellation Constellation::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("Constellation: scale factor must be positive");
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(factor * p);
  return Constellation(std::move(pts), name_);
}

Constellation bpsk() {
  return Constellation({Point::Constant(1, 1.0), Point::Constant(1, -1.0)}, "bpsk");
}

Constellation qpsk(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("qpsk: scale must be positive");
  const double a = scale / std::numbers::sqrt2;
  std::vector<Point> pts;
  for (double i : {a, -a}) {
    for (double q : {a, -a}) {
      Point p(2);
      p << i, q;
      pts.push_back(p);
    }
  }
  return Constellation(std::move(pts), "qpsk");
}

Constellation constellation_by_name(const std::string& name) {
  if (name == "bpsk") return bpsk();
  if (name == "qpsk") return qpsk(1.0);
  throw std::invalid_argument("unknown constellation '" + name + "' (expected bpsk or qpsk)");
}

std::size_t sample_message(const Constellation& c, RngStream& rng) {
  return static_cast<std::size_t>(rng.next_below(c.size()));
}

Constellation lattice_constellation(const Lattice& lat, std::size_t m) {
  if (m == 0) throw std::invalid_argument("lattice_constellation: need at least one point");
  const int k = lat.dim();
  std::size_t f = 1;
  while (static_cast<std::size_t>(std::pow(static_cast<double>(f), k) + 0.5) < m) ++f;
  const std::size_t cosets = k == 1 ? f : f * f;

  std::vector<Point> pts;
  Point centroid = Point::Zero(k);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t idx = j * cosets / m;
    Point c(k);
    c(0) = (static_cast<double>(idx % f) + 0.5) / static_cast<double>(f);
    if (k == 2) c(1) = (static_cast<double>(idx / f) + 0.5) / static_cast<double>(f);
    const Point p = lat.mod((c.transpose() * lat.generator()).transpose());
    centroid += p;
    pts.push_back(p);
  }
  centroid /= static_cast<double>(m);
  for (auto& p : pts) {
    p -= centroid;
    if (!lat.nearest_point(p).isZero(0.0))
      throw std::invalid_argument("lattice_constellation: point falls outside the Voronoi region");
  }
  return Constellation(std::move(pts), "lattice");
}

}  // namespace ndpc
