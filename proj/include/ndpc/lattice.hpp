#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ndpc/numeric.hpp"
#include "ndpc/rng.hpp"

namespace ndpc {

using Basis = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using Coeffs = Eigen::Matrix<long, Eigen::Dynamic, 1, 0, 2, 1>;

/// Full-rank lattice in R^k (k <= 2). Rows of the generator are basis
/// vectors, so a lattice point is c^T G for an integer coefficient vector c.
class Lattice {
 public:
  explicit Lattice(Basis generator);

  int dim() const { return static_cast<int>(generator_.rows()); }
  const Basis& generator() const { return generator_; }
  double cell_volume() const;

  /// Real-valued coordinates of z in the generator basis.
  Point coordinates(const Point& z) const;
  Point point(const Coeffs& c) const;

  /// Closest lattice point to z. Searches integer offsets in {-2..2}^k around
  /// the rounded basis coordinates; exact distance ties go to the
  /// lexicographically largest coefficient vector, which makes the scalar
  /// case reduce into [-delta/2, delta/2).
  Point nearest_point(const Point& z) const;
  Coeffs nearest_coeffs(const Point& z) const;

  /// z - nearest_point(z): the fold into the fundamental Voronoi region.
  Point mod(const Point& z) const;

  bool contains(const Point& z, double tol = 1e-9) const;

  /// Vertices of the fundamental Voronoi region in counter-clockwise order
  /// (k = 2), or its two endpoints (k = 1).
  std::vector<Point> voronoi_vertices() const;
  /// Exact per-dimension second moment of the Voronoi region, integrated over
  /// the polygon in closed form.
  double exact_second_moment() const;

 private:
  Basis generator_;
  Basis inverse_;
};

Lattice scalar_lattice(double delta);
Lattice cubic_lattice_2d(double delta);
/// Hexagonal lattice with basis c(1,0), c(1/2, sqrt(3)/2) scaled to the given cell volume.
Lattice hexagonal_lattice(double volume);

/// Construction A: scale * (C + q Z^2) for a linear code C over Z_q of length 2.
Lattice construction_a(const std::vector<std::vector<int>>& code_words, int q, double scale);

/// Uniform sample over the fundamental Voronoi region.
Point sample_dither(const Lattice& lat, RngStream& rng);

/// Monte Carlo estimate of E||U||^2 / k for Voronoi-uniform U.
double second_moment(const Lattice& lat, std::size_t n_samples, RngStream& rng);

/// Named lattice families accepted on the command line:
/// `scalar:<delta>`, `cubic2:<delta>`, `hex:<volume>`, `constructionA:<q>:<scale>`.
/// Construction A presets use the repetition code {0...0, 1...1} over Z_q.
struct LatticePreset {
  enum class Family { Scalar, Cubic2, Hexagonal, ConstructionA };
  Family family = Family::Scalar;
  double size = 1.0;  // delta, volume, or scale depending on family
  int q = 2;

  static LatticePreset parse(std::string_view text);
  std::string to_string() const;
  int dim() const { return family == Family::Scalar ? 1 : 2; }
  Lattice build() const;
  /// Per-dimension second moment of the Voronoi region (exact).
  double per_dim_power() const;
  /// Same family resized so that per_dim_power() equals `power`.
  LatticePreset with_per_dim_power(double power) const;
};

}  // namespace ndpc
