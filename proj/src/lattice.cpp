#include "ndpc/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

namespace ndpc {

namespace {

constexpr long kSearchRadius = 2;

double cross(const Point& a, const Point& b) { return a(0) * b(1) - a(1) * b(0); }

// Keeps the part of `poly` with x . normal <= offset.
std::vector<Point> clip(const std::vector<Point>& poly, const Point& normal, double offset) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % n];
    const double dc = cur.dot(normal) - offset;
    const double dn = nxt.dot(normal) - offset;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

// Gauss-Lagrange reduction of a 2-D basis (rows).
Basis lagrange_reduce(Basis g) {
  for (int iter = 0; iter < 64; ++iter) {
    if (g.row(0).squaredNorm() > g.row(1).squaredNorm()) g.row(0).swap(g.row(1));
    const double mu = std::round(g.row(0).dot(g.row(1)) / g.row(0).squaredNorm());
    if (mu == 0.0) break;
    g.row(1) -= mu * g.row(0);
  }
  return g;
}

}  // namespace

Lattice::Lattice(Basis generator) : generator_(std::move(generator)) {
  const auto k = generator_.rows();
  if (k < 1 || k > 2 || generator_.cols() != k)
    throw std::invalid_argument("Lattice: generator must be square of dimension 1 or 2");
  if (!generator_.allFinite()) throw std::invalid_argument("Lattice: generator must be finite");
  if (std::abs(generator_.determinant()) <= 1e-12)
    throw std::invalid_argument("Lattice: generator is singular");
  inverse_ = generator_.inverse();
}

double Lattice::cell_volume() const { return std::abs(generator_.determinant()); }

Point Lattice::coordinates(const Point& z) const { return (z.transpose() * inverse_).transpose(); }

Point Lattice::point(const Coeffs& c) const {
  return (c.cast<double>().transpose() * generator_).transpose();
}

Coeffs Lattice::nearest_coeffs(const Point& z) const {
  if (z.size() != dim()) throw std::invalid_argument("nearest_point: dimension mismatch");
  const Point a = coordinates(z);
  Coeffs base(dim());
  for (int i = 0; i < dim(); ++i) base(i) = std::lround(a(i));

  Coeffs best = base;
  double best_d = std::numeric_limits<double>::infinity();
  Coeffs c = base;
  // Offsets are visited in increasing lexicographic order, so `<=` keeps the
  // largest coefficient vector among exact ties.
  if (dim() == 1) {
    for (long o = -kSearchRadius; o <= kSearchRadius; ++o) {
      c(0) = base(0) + o;
      const double d = (z - point(c)).squaredNorm();
      if (d <= best_d) best_d = d, best = c;
    }
  } else {
    for (long o0 = -kSearchRadius; o0 <= kSearchRadius; ++o0) {
      for (long o1 = -kSearchRadius; o1 <= kSearchRadius; ++o1) {
        c(0) = base(0) + o0;
        c(1) = base(1) + o1;
        const double d = (z - point(c)).squaredNorm();
        if (d <= best_d) best_d = d, best = c;
      }
    }
  }
  return best;
}

Point Lattice::nearest_point(const Point& z) const { return point(nearest_coeffs(z)); }

Point Lattice::mod(const Point& z) const { return z - nearest_point(z); }

bool Lattice::contains(const Point& z, double tol) const {
  const Point a = coordinates(z);
  for (int i = 0; i < dim(); ++i)
    if (std::abs(a(i) - std::round(a(i))) > tol) return false;
  return true;
}

std::vector<Point> Lattice::voronoi_vertices() const {
  if (dim() == 1) {
    const double h = std::abs(generator_(0, 0)) / 2.0;
    return {Point::Constant(1, -h), Point::Constant(1, h)};
  }
  const Basis g = lagrange_reduce(generator_);
  const double r = g.row(0).norm() + g.row(1).norm();
  std::vector<Point> poly;
  for (auto [x, y] : {std::pair{-r, -r}, {r, -r}, {r, r}, {-r, r}}) {
    Point p(2);
    p << x, y;
    poly.push_back(p);
  }
  for (long i = -3; i <= 3; ++i) {
    for (long j = -3; j <= 3; ++j) {
      if (i == 0 && j == 0) continue;
      const Point p = (static_cast<double>(i) * g.row(0) + static_cast<double>(j) * g.row(1)).transpose();
      poly = clip(poly, p, p.squaredNorm() / 2.0);
    }
  }
  return poly;
}

double Lattice::exact_second_moment() const {
  if (dim() == 1) {
    const double d = std::abs(generator_(0, 0));
    return d * d / 12.0;
  }
  const auto poly = voronoi_vertices();
  double area = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double tri = cross(a, b) / 2.0;
    area += tri;
    moment += tri / 6.0 * (a.squaredNorm() + b.squaredNorm() + a.dot(b));
  }
  return moment / (2.0 * area);
}

Lattice scalar_lattice(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("scalar_lattice: delta must be positive");
  Basis g(1, 1);
  g << delta;
  return Lattice(g);
}

Lattice cubic_lattice_2d(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cubic_lattice_2d: delta must be positive");
  Basis g(2, 2);
  g << delta, 0.0, 0.0, delta;
  return Lattice(g);
}

Lattice hexagonal_lattice(double volume) {
  if (!(volume > 0.0)) throw std::invalid_argument("hexagonal_lattice: volume must be positive");
  const double c = std::sqrt(volume / (std::numbers::sqrt3 / 2.0));
  Basis g(2, 2);
  g << c, 0.0, c / 2.0, c * std::numbers::sqrt3 / 2.0;
  return Lattice(g);
}

Lattice construction_a(const std::vector<std::vector<int>>& code_words, int q, double scale) {
  if (q < 2) throw std::invalid_argument("construction_a: modulus must be at least 2");
  if (!(scale > 0.0)) throw std::invalid_argument("construction_a: scale must be positive");
  std::set<std::pair<int, int>> code;
  for (const auto& w : code_words) {
    if (w.size() != 2) throw std::invalid_argument("construction_a: code length must be 2");
    for (int s : w)
      if (s < 0 || s >= q) throw std::invalid_argument("construction_a: symbol outside Z_q");
    code.insert({w[0], w[1]});
  }
  if (!code.contains({0, 0})) throw std::invalid_argument("construction_a: code lacks the zero word");
  for (const auto& a : code)
    for (const auto& b : code)
      if (!code.contains({(a.first + b.first) % q, (a.second + b.second) % q}))
        throw std::invalid_argument("construction_a: code is not closed under addition mod q");

  // Integer row reduction of [codewords; q I] to Hermite form.
  std::vector<std::array<long, 2>> rows;
  for (const auto& w : code) rows.push_back({w.first, w.second});
  rows.push_back({q, 0});
  rows.push_back({0, q});

  auto reduce_column = [](std::vector<std::array<long, 2>>& rs, int col) {
    // Euclid across rows until at most one row has a nonzero entry in `col`.
    for (;;) {
      std::size_t pivot = rs.size();
      for (std::size_t i = 0; i < rs.size(); ++i)
        if (rs[i][col] != 0 && (pivot == rs.size() || std::abs(rs[i][col]) < std::abs(rs[pivot][col])))
          pivot = i;
      if (pivot == rs.size()) return std::array<long, 2>{0, 0};
      bool done = true;
      for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i == pivot || rs[i][col] == 0) continue;
        const long f = rs[i][col] / rs[pivot][col];
        rs[i][0] -= f * rs[pivot][0];
        rs[i][1] -= f * rs[pivot][1];
        if (rs[i][col] != 0) done = false;
      }
      if (done) {
        auto p = rs[pivot];
        rs.erase(rs.begin() + static_cast<long>(pivot));
        return p;
      }
    }
  };
  const auto first = reduce_column(rows, 0);
  const auto second = reduce_column(rows, 1);

  Basis g(2, 2);
  g << static_cast<double>(first[0]), static_cast<double>(first[1]),
      static_cast<double>(second[0]), static_cast<double>(second[1]);
  return Lattice(scale * lagrange_reduce(g));
}

Point sample_dither(const Lattice& lat, RngStream& rng) {
  Point w(lat.dim());
  for (int i = 0; i < lat.dim(); ++i) w(i) = rng.next_uniform();
  const Point u = (w.transpose() * lat.generator()).transpose();
  return lat.mod(u);
}

double second_moment(const Lattice& lat, std::size_t n_samples, RngStream& rng) {
  if (n_samples == 0) throw std::invalid_argument("second_moment: need at least one sample");
  double acc = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) acc += sample_dither(lat, rng).squaredNorm();
  return acc / static_cast<double>(n_samples) / lat.dim();
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto pos = s.find(sep);
    parts.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LatticePreset LatticePreset::parse(std::string_view text) {
  const auto parts = split(text, ':');
  LatticePreset p;
  const auto& name = parts[0];
  if (name == "scalar" || name == "cubic2" || name == "hex") {
    if (parts.size() != 2) throw std::invalid_argument("lattice preset '" + std::string(text) + "' needs one parameter");
    p.family = name == "scalar" ? Family::Scalar : name == "cubic2" ? Family::Cubic2 : Family::Hexagonal;
    p.size = parse_number(parts[1], "lattice size");
  } else if (name == "constructionA") {
    if (parts.size() != 3) throw std::invalid_argument("constructionA preset needs <q>:<scale>");
    p.family = Family::ConstructionA;
    const double q = parse_number(parts[1], "modulus");
    if (q != std::floor(q)) throw std::invalid_argument("constructionA modulus must be an integer");
    p.q = static_cast<int>(q);
    p.size = parse_number(parts[2], "lattice scale");
  } else {
    throw std::invalid_argument("unknown lattice preset '" + std::string(text) + "'");
  }
  if (!(p.size > 0.0)) throw std::invalid_argument("lattice size must be positive");
  if (p.family == Family::ConstructionA && p.q < 2) throw std::invalid_argument("constructionA modulus must be >= 2");
  return p;
}

std::string LatticePreset::to_string() const {
  switch (family) {
    case Family::Scalar: return "scalar:" + format_number(size);
    case Family::Cubic2: return "cubic2:" + format_number(size);
    case Family::Hexagonal: return "hex:" + format_number(size);
    case Family::ConstructionA: return "constructionA:" + std::to_string(q) + ":" + format_number(size);
  }
  return {};
}

Lattice LatticePreset::build() const {
  switch (family) {
    case Family::Scalar: return scalar_lattice(size);
    case Family::Cubic2: return cubic_lattice_2d(size);
    case Family::Hexagonal: return hexagonal_lattice(size);
    case Family::ConstructionA: {
      std::vector<std::vector<int>> code;
      for (int s = 0; s < q; ++s) code.push_back({s, s});
      return construction_a(code, q, size);
    }
  }
  throw std::logic_error("unreachable lattice family");
}

double LatticePreset::per_dim_power() const { return build().exact_second_moment(); }

LatticePreset LatticePreset::with_per_dim_power(double power) const {
  if (!(power > 0.0)) throw std::invalid_argument("lattice power must be positive");
  LatticePreset out = *this;
  const double ratio = power / per_dim_power();
  // Hexagonal presets are parameterized by volume, which scales like power.
  out.size = family == Family::Hexagonal ? size * ratio : size * std::sqrt(ratio);
  return out;
}

}  // namespace ndpc
