#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ndpc/lattice.hpp"
#include "ndpc/numeric.hpp"
#include "ndpc/rng.hpp"

namespace ndpc {

/// Finite message set embedded in R^k. Index i maps to points()[i].
class Constellation {
 public:
  Constellation(std::vector<Point> points, std::string name);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t index) const;
  const std::string& name() const { return name_; }

  /// Mean squared norm of the points.
  double average_power() const;
  /// Same ordering, every point multiplied by `factor`.
  Constellation scaled(double factor) const;

 private:
  std::vector<Point> points_;
  int dim_ = 0;
  std::string name_;
};

/// k = 1: index 0 -> +1, index 1 -> -1.
Constellation bpsk();

/// k = 2: scale * (+-1/sqrt2, +-1/sqrt2) ordered (+,+), (+,-), (-,+), (-,-).
Constellation qpsk(double scale = 1.0);

/// Looks up "bpsk" or "qpsk".
Constellation constellation_by_name(const std::string& name);

std::size_t sample_message(const Constellation& c, RngStream& rng);

/// m zero-mean points inside the fundamental Voronoi region of `lat`.
///
/// Takes the m evenly indexed cosets of lat/f in lat (f = ceil(m^(1/k))),
/// represented by the centres ((c + 1/2) / f) G of the fine cells, reduces
/// them mod lat and removes their centroid. Throws if a resulting point is
/// not its own reduction.
Constellation lattice_constellation(const Lattice& lat, std::size_t m);

}  // namespace ndpc
