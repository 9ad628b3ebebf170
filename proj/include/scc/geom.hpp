#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scc/dual.hpp"
#include "scc/error.hpp"

namespace scc::geom {

template <class T>
using Vec2T = Eigen::Matrix<T, 2, 1>;
using Vec2 = Eigen::Vector2d;

inline constexpr double kMinEdgeLength = 1e-12;  // meters

/// Planar convex polygon, vertices stored counterclockwise. CW input is
/// reversed on construction; degenerate or non-convex input is rejected.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices)
      : verts_(std::move(vertices)) {
    if (verts_.size() < 3) {
      throw InvalidArgument("polygon needs at least 3 vertices, got " +
                            std::to_string(verts_.size()));
    }
    double area2 = 0.0;  // shoelace, twice the signed area
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const Vec2& p = verts_[i];
      const Vec2& q = verts_[(i + 1) % verts_.size()];
      area2 += p.x() * q.y() - q.x() * p.y();
    }
    if (area2 < 0.0) std::reverse(verts_.begin(), verts_.end());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const std::size_t n = verts_.size();
      Vec2 e0 = verts_[(i + 1) % n] - verts_[i];
      Vec2 e1 = verts_[(i + 2) % n] - verts_[(i + 1) % n];
      if (e0.norm() < kMinEdgeLength) {
        throw InvalidArgument("polygon has degenerate edge at vertex " +
                              std::to_string(i));
      }
      if (e0.x() * e1.y() - e0.y() * e1.x() < -1e-12) {
        throw InvalidArgument("polygon is not convex at vertex " +
                              std::to_string((i + 1) % n));
      }
    }
  }

  const std::vector<Vec2>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }

  /// Vertex mean (the centroid used by the smoothed-extent metric).
  Vec2 centroid() const {
    Vec2 c = Vec2::Zero();
    for (const Vec2& v : verts_) c += v;
    return c / static_cast<double>(verts_.size());
  }

  /// Largest pairwise vertex distance.
  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < verts_.size(); ++i)
      for (std::size_t j = i + 1; j < verts_.size(); ++j)
        d = std::max(d, (verts_[i] - verts_[j]).norm());
    return d;
  }

 private:
  std::vector<Vec2> verts_;
};

struct SignedDistance {
  double value = 0.0;  // meters; positive = separated
  // Populated by the smooth metrics only: d(value)/d(vertex), ordered as
  // A's vertices then B's.
  std::optional<std::vector<Vec2>> grad_wrt_vertices;
};

using AxisSet = std::vector<Vec2>;

enum class Metric { Sat, Ssat, Dcsat };

struct SmoothParams {
  double alpha = 1000.0;  // 1/m, log-sum-exp sharpness
  double mu = 1e-4;       // m, smooth-abs rounding (SSAT only)
};

// ---------------------------------------------------------------------
// Generic cores, usable with double or dual scalars.
// ---------------------------------------------------------------------

/// Outward unit edge normals of a CCW vertex loop, in edge order.
template <class T>
std::vector<Vec2T<T>> edge_normals(std::span<const Vec2T<T>> verts) {
  using diff::sqrt;
  using std::sqrt;
  std::vector<Vec2T<T>> normals;
  normals.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    Vec2T<T> e = verts[(i + 1) % verts.size()] - verts[i];
    T len = sqrt(e.x() * e.x() + e.y() * e.y());
    if (diff::scalar_value(len) < kMinEdgeLength) {
      throw InvalidArgument("degenerate edge at vertex " + std::to_string(i));
    }
    normals.push_back(Vec2T<T>(e.y() / len, -e.x() / len));
  }
  return normals;
}

template <class T>
void project_extent(std::span<const Vec2T<T>> verts, const Vec2T<T>& axis,
                    T& lo, T& hi) {
  lo = hi = axis.dot(verts[0]);
  for (std::size_t i = 1; i < verts.size(); ++i) {
    T p = axis.dot(verts[i]);
    if (p < lo) lo = p;
    if (p > hi) hi = p;
  }
}

/// Signed projection gaps along one axis: d1 is positive when B lies
/// beyond A along the axis, d2 when A lies beyond B. At most one is
/// positive.
template <class T>
std::pair<T, T> axis_gaps(std::span<const Vec2T<T>> a,
                          std::span<const Vec2T<T>> b, const Vec2T<T>& axis) {
  T lo_a, hi_a, lo_b, hi_b;
  project_extent(a, axis, lo_a, hi_a);
  project_extent(b, axis, lo_b, hi_b);
  return {lo_b - hi_a, lo_a - hi_b};
}

/// Candidate separating axes: one outward normal per edge of each
/// polygon, A's edges first, no deduplication.
template <class T>
std::vector<Vec2T<T>> candidate_axes(std::span<const Vec2T<T>> a,
                                     std::span<const Vec2T<T>> b) {
  std::vector<Vec2T<T>> axes = edge_normals(a);
  std::vector<Vec2T<T>> bn = edge_normals(b);
  axes.insert(axes.end(), bn.begin(), bn.end());
  return axes;
}

template <class T>
T sat_value(std::span<const Vec2T<T>> a, std::span<const Vec2T<T>> b) {
  std::vector<Vec2T<T>> axes = candidate_axes(a, b);
  T best = std::numeric_limits<double>::lowest();
  for (const Vec2T<T>& axis : axes) {
    auto [d1, d2] = axis_gaps(a, b, axis);
    T g = d1 > d2 ? d1 : d2;
    if (g > best) best = g;
  }
  return best;
}

/// Log-sum-exp over all 2|axes| per-axis gaps minus log(2|axes|)/alpha;
/// max-shifted so alpha*d up to +-1e4 cannot overflow.
template <class T>
T dcsat_value(std::span<const Vec2T<T>> a, std::span<const Vec2T<T>> b,
              double alpha) {
  using diff::exp;
  using diff::log;
  using std::exp;
  using std::log;
  if (!(alpha > 0.0)) throw InvalidArgument("dcsat: alpha must be positive");
  std::vector<Vec2T<T>> axes = candidate_axes(a, b);
  std::vector<T> gaps;
  gaps.reserve(2 * axes.size());
  for (const Vec2T<T>& axis : axes) {
    auto [d1, d2] = axis_gaps(a, b, axis);
    gaps.push_back(d1);
    gaps.push_back(d2);
  }
  T m = gaps[0];
  for (const T& d : gaps)
    if (d > m) m = d;
  T sum = 0.0;
  for (const T& d : gaps) sum += exp(alpha * (d - m));
  return m + log(sum) / alpha -
         std::log(static_cast<double>(gaps.size())) / alpha;
}

namespace detail {

template <class T>
T soft_abs(const T& x, double mu) {
  using diff::sqrt;
  using std::sqrt;
  return sqrt(x * x + mu * mu);
}

// Smoothed projection half-extent about the vertex centroid:
// (1/alpha) log sum_j exp(alpha * softabs(axis . (v_j - c))).
template <class T>
T smooth_extent(std::span<const Vec2T<T>> verts, const Vec2T<T>& centroid,
                const Vec2T<T>& axis, double alpha, double mu) {
  using diff::exp;
  using diff::log;
  using std::exp;
  using std::log;
  std::vector<T> terms;
  terms.reserve(verts.size());
  for (const Vec2T<T>& v : verts)
    terms.push_back(soft_abs<T>(axis.dot(v - centroid), mu));
  T m = terms[0];
  for (const T& t : terms)
    if (t > m) m = t;
  T sum = 0.0;
  for (const T& t : terms) sum += exp(alpha * (t - m));
  return m + log(sum) / alpha;
}

template <class T>
Vec2T<T> vertex_mean(std::span<const Vec2T<T>> verts) {
  Vec2T<T> c = Vec2T<T>::Zero();
  for (const Vec2T<T>& v : verts) c += v;
  return (c / static_cast<double>(verts.size())).eval();
}

}  // namespace detail

/// Smoothed-extent baseline: per axis, centroid separation through a
/// smooth absolute value minus smoothed half-extents, combined with a
/// log-sum-exp over axes. Everywhere differentiable; may overestimate
/// the exact separation.
template <class T>
T ssat_value(std::span<const Vec2T<T>> a, std::span<const Vec2T<T>> b,
             double alpha, double mu) {
  using diff::exp;
  using diff::log;
  using std::exp;
  using std::log;
  if (!(alpha > 0.0)) throw InvalidArgument("ssat: alpha must be positive");
  if (!(mu > 0.0)) throw InvalidArgument("ssat: mu must be positive");
  std::vector<Vec2T<T>> axes = candidate_axes(a, b);
  Vec2T<T> ca = detail::vertex_mean(a);
  Vec2T<T> cb = detail::vertex_mean(b);
  std::vector<T> gaps;
  gaps.reserve(axes.size());
  for (const Vec2T<T>& axis : axes) {
    T center = detail::soft_abs<T>(axis.dot(cb - ca), mu);
    T ea = detail::smooth_extent(a, ca, axis, alpha, mu);
    T eb = detail::smooth_extent(b, cb, axis, alpha, mu);
    gaps.push_back(center - ea - eb);
  }
  T m = gaps[0];
  for (const T& g : gaps)
    if (g > m) m = g;
  T sum = 0.0;
  for (const T& g : gaps) sum += exp(alpha * (g - m));
  return m + log(sum) / alpha;
}

// ---------------------------------------------------------------------
// Public double-precision operations on validated polygons.
// ---------------------------------------------------------------------

inline std::span<const Vec2> verts_of(const ConvexPolygon& p) {
  return {p.vertices().data(), p.vertices().size()};
}

/// One outward unit normal per edge of a then of b, in edge order,
/// no deduplication.
inline AxisSet edge_normal_axes(const ConvexPolygon& a,
                                const ConvexPolygon& b) {
  return candidate_axes<double>(verts_of(a), verts_of(b));
}

inline std::pair<double, double> per_axis_gaps(const ConvexPolygon& a,
                                               const ConvexPolygon& b,
                                               const Vec2& axis) {
  return axis_gaps<double>(verts_of(a), verts_of(b), axis);
}

inline SignedDistance sat_distance(const ConvexPolygon& a,
                                   const ConvexPolygon& b) {
  return {sat_value<double>(verts_of(a), verts_of(b)), std::nullopt};
}

/// The SAT value together with the maximizing axis, oriented from b
/// towards a. Ties resolve to the lowest axis index.
struct SatAxisResult {
  double value = 0.0;
  std::size_t axis_index = 0;
  Vec2 axis_b_to_a = Vec2::Zero();
};

inline SatAxisResult sat_axis(const ConvexPolygon& a, const ConvexPolygon& b) {
  AxisSet axes = edge_normal_axes(a, b);
  SatAxisResult best;
  best.value = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    auto [d1, d2] = per_axis_gaps(a, b, axes[i]);
    // d1: b beyond a along +axis, so b->a points along -axis.
    double g = std::max(d1, d2);
    if (g > best.value) {
      best.value = g;
      best.axis_index = i;
      best.axis_b_to_a = d1 >= d2 ? Vec2(-axes[i]) : axes[i];
    }
  }
  return best;
}

namespace detail {

template <class Field>
std::vector<Vec2> vertex_gradient(const ConvexPolygon& a,
                                  const ConvexPolygon& b, Field&& field) {
  const std::size_t ka = a.size(), kb = b.size();
  Eigen::VectorXd x(2 * (ka + kb));
  for (std::size_t i = 0; i < ka; ++i)
    x.segment<2>(2 * i) = a.vertices()[i];
  for (std::size_t j = 0; j < kb; ++j)
    x.segment<2>(2 * (ka + j)) = b.vertices()[j];
  Eigen::VectorXd g = diff::gradient(
      [&](const diff::VecX<diff::Dual1>& xd) {
        std::vector<Vec2T<diff::Dual1>> va(ka), vb(kb);
        for (std::size_t i = 0; i < ka; ++i)
          va[i] = Vec2T<diff::Dual1>(xd[2 * i], xd[2 * i + 1]);
        for (std::size_t j = 0; j < kb; ++j)
          vb[j] = Vec2T<diff::Dual1>(xd[2 * (ka + j)], xd[2 * (ka + j) + 1]);
        return field(std::span<const Vec2T<diff::Dual1>>(va),
                     std::span<const Vec2T<diff::Dual1>>(vb));
      },
      x);
  std::vector<Vec2> out(ka + kb);
  for (std::size_t i = 0; i < ka + kb; ++i) out[i] = g.segment<2>(2 * i);
  return out;
}

}  // namespace detail

inline SignedDistance dcsat_distance(const ConvexPolygon& a,
                                     const ConvexPolygon& b, double alpha) {
  SignedDistance r;
  r.value = dcsat_value<double>(verts_of(a), verts_of(b), alpha);
  r.grad_wrt_vertices = detail::vertex_gradient(
      a, b, [alpha](auto va, auto vb) { return dcsat_value(va, vb, alpha); });
  return r;
}

inline SignedDistance ssat_distance(const ConvexPolygon& a,
                                    const ConvexPolygon& b, double alpha,
                                    double mu) {
  SignedDistance r;
  r.value = ssat_value<double>(verts_of(a), verts_of(b), alpha, mu);
  r.grad_wrt_vertices = detail::vertex_gradient(
      a, b,
      [alpha, mu](auto va, auto vb) { return ssat_value(va, vb, alpha, mu); });
  return r;
}

inline std::vector<SignedDistance> batch_distances(
    std::span<const std::pair<ConvexPolygon, ConvexPolygon>> pairs,
    Metric metric, const SmoothParams& params = {}) {
  std::vector<SignedDistance> out;
  out.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    try {
      switch (metric) {
        case Metric::Sat:
          out.push_back(sat_distance(pairs[k].first, pairs[k].second));
          break;
        case Metric::Ssat:
          out.push_back(ssat_distance(pairs[k].first, pairs[k].second,
                                      params.alpha, params.mu));
          break;
        case Metric::Dcsat:
          out.push_back(
              dcsat_distance(pairs[k].first, pairs[k].second, params.alpha));
          break;
      }
    } catch (const Error& e) {
      throw InvalidArgument("pair " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Helpers and plain-text serialization.
// ---------------------------------------------------------------------

inline ConvexPolygon translated(const ConvexPolygon& p, const Vec2& delta) {
  std::vector<Vec2> v = p.vertices();
  for (Vec2& x : v) x += delta;
  return ConvexPolygon(std::move(v));
}

inline ConvexPolygon make_box(const Vec2& lo, const Vec2& hi) {
  return ConvexPolygon({{lo.x(), lo.y()},
                        {hi.x(), lo.y()},
                        {hi.x(), hi.y()},
                        {lo.x(), hi.y()}});
}

/// One vertex per line "x y", polygons separated by blank lines.
inline std::string polygons_to_text(std::span<const ConvexPolygon> polys) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < polys.size(); ++k) {
    if (k > 0) os << "\n";
    for (const Vec2& v : polys[k].vertices())
      os << v.x() << " " << v.y() << "\n";
  }
  return os.str();
}

inline std::vector<ConvexPolygon> polygons_from_text(const std::string& text) {
  std::vector<ConvexPolygon> polys;
  std::vector<Vec2> current;
  std::istringstream is(text);
  std::string line;
  auto flush = [&] {
    if (!current.empty()) {
      polys.emplace_back(std::move(current));
      current.clear();
    }
  };
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    double x, y;
    if (ls >> x >> y) {
      current.emplace_back(x, y);
    } else if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
    } else {
      throw InvalidArgument("polygon text: bad vertex line '" + line + "'");
    }
  }
  flush();
  return polys;
}

}  // namespace scc::geom
