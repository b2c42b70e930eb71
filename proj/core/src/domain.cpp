#include "fraclab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

Domain1D Domain1D::make(std::vector<std::pair<double, double>> intervals) {
  if (intervals.empty()) throw ArgumentError("domain needs at least one interval");
  std::vector<Interval> iv;
  iv.reserve(intervals.size());
  for (const auto& [a, b] : intervals) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw ArgumentError("interval endpoints must be finite");
    if (b <= a) {
      std::ostringstream os;
      os << "degenerate interval (" << a << ", " << b << ")";
      throw DegenerateError(os.str());
    }
    iv.push_back({a, b});
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].a <= iv[i - 1].b) {
      std::ostringstream os;
      os << "intervals (" << iv[i - 1].a << ", " << iv[i - 1].b << ") and (" << iv[i].a << ", " << iv[i].b
         << ") touch or overlap";
      throw OverlapError(os.str());
    }
  }
  return Domain1D(std::move(iv));
}

std::size_t Domain1D::locate(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& I) { return v < I.b; });
  if (it != intervals_.end() && it->a < x && x < it->b) {
    return static_cast<std::size_t>(it - intervals_.begin());
  }
  return intervals_.size();
}

bool Domain1D::contains(double x) const { return locate(x) < intervals_.size(); }

double Domain1D::dist_to_complement(double x) const {
  const std::size_t i = locate(x);
  if (i == intervals_.size()) return 0.0;
  return std::min(x - intervals_[i].a, intervals_[i].b - x);
}

std::vector<BoundaryPoint1D> Domain1D::boundary_points() const {
  std::vector<BoundaryPoint1D> out;
  out.reserve(2 * intervals_.size());
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    out.push_back({intervals_[i].a, -1, Side::kLeft, i});
    out.push_back({intervals_[i].b, +1, Side::kRight, i});
  }
  return out;
}

bool Domain1D::is_symmetric(double tol) const {
  const std::size_t n = intervals_.size();
  const double scale = std::max(std::abs(lower()), std::abs(upper()));
  for (std::size_t i = 0; i < n; ++i) {
    const Interval& l = intervals_[i];
    const Interval& r = intervals_[n - 1 - i];
    if (std::abs(l.a + r.b) > tol * scale || std::abs(l.b + r.a) > tol * scale) return false;
  }
  return true;
}

Domain1D Domain1D::with_moved_endpoint(const BoundaryPoint1D& bp, double shift) const {
  if (bp.interval >= intervals_.size()) throw ArgumentError("boundary point does not belong to this domain");
  std::vector<std::pair<double, double>> iv;
  for (const auto& I : intervals_) iv.emplace_back(I.a, I.b);
  auto& target = iv[bp.interval];
  if (bp.side == Side::kLeft) {
    target.first -= shift;
  } else {
    target.second += shift;
  }
  try {
    return make(std::move(iv));
  } catch (const OverlapError& e) {
    throw DomainCollisionError(e.what());
  } catch (const DegenerateError& e) {
    throw DomainCollisionError(e.what());
  }
}

Domain1D Domain1D::scaled(double factor) const {
  std::vector<std::pair<double, double>> iv;
  for (const auto& I : intervals_) iv.emplace_back(I.a * factor, I.b * factor);
  return make(std::move(iv));
}

double grading_map(double t, double beta) {
  if (beta == 1.0) return t;
  const double p = std::pow(t, beta);
  const double q = std::pow(1.0 - t, beta);
  return p / (p + q);
}

Mesh1D Mesh1D::make(const Domain1D& domain, int n_per_interval, double beta) {
  if (n_per_interval < 2) throw ArgumentError("need at least 2 elements per interval");
  if (!(beta >= 1.0)) throw ArgumentError("grading exponent must be >= 1");
  Mesh1D mesh(domain, n_per_interval, beta);
  const int n = n_per_interval;
  int dof = 0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Interval I = domain.intervals()[i];
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    // Fill the left half from a and mirror from b so meshes of symmetric
    // domains are exactly symmetric.
    for (int j = 0; j <= n / 2; ++j) {
      const double sigma = grading_map(static_cast<double>(j) / n, beta);
      x[j] = I.a + I.length() * sigma;
      x[n - j] = I.b - I.length() * sigma;
    }
    x[0] = I.a;
    x[n] = I.b;
    for (int j = 1; j <= n; ++j) {
      if (!(x[j] > x[j - 1])) throw ArgumentError("mesh nodes are not strictly increasing; grading too strong");
    }
    for (int j = 0; j < n; ++j) {
      Element e;
      e.x0 = x[j];
      e.x1 = x[j + 1];
      e.dof0 = j == 0 ? -1 : dof + j - 1;
      e.dof1 = j + 1 == n ? -1 : dof + j;
      e.interval = i;
      mesh.elements_.push_back(e);
    }
    for (int j = 1; j < n; ++j) mesh.dof_x_.push_back(x[j]);
    dof += n - 1;
    mesh.nodes_.push_back(std::move(x));
  }
  return mesh;
}

double Mesh1D::boundary_element_size(const BoundaryPoint1D& bp) const {
  const auto& x = nodes_.at(bp.interval);
  return bp.side == Side::kLeft ? x[1] - x[0] : x[x.size() - 1] - x[x.size() - 2];
}

double Mesh1D::interpolate(std::span<const double> u, double x) const {
  const std::size_t i = domain_.locate(x);
  if (i == domain_.size()) return 0.0;
  const auto& nd = nodes_[i];
  auto it = std::upper_bound(nd.begin(), nd.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - nd.begin()) - 1;
  const Element& e = elements_[i * static_cast<std::size_t>(n_) + j];
  const double t = (x - e.x0) / e.length();
  const double u0 = e.dof0 < 0 ? 0.0 : u[e.dof0];
  const double u1 = e.dof1 < 0 ? 0.0 : u[e.dof1];
  return (1.0 - t) * u0 + t * u1;
}

std::vector<int> Mesh1D::mirror_map(double tol) const {
  if (!domain_.is_symmetric()) throw AsymmetricMeshError("domain is not symmetric under x -> -x");
  const int n = dof_count();
  std::vector<int> map(static_cast<std::size_t>(n));
  const double scale = std::max(std::abs(domain_.lower()), std::abs(domain_.upper()));
  for (int i = 0; i < n; ++i) {
    const int j = n - 1 - i;
    if (std::abs(dof_x_[i] + dof_x_[j]) > tol * scale) {
      throw AsymmetricMeshError("mesh nodes are not symmetric under x -> -x");
    }
    map[i] = j;
  }
  return map;
}

double BoundingBox2D::diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

std::vector<BoundarySample2D> sample_boundary_2d(const ImplicitDomain2D& dom, int m) {
  if (m < 8) throw ArgumentError("boundary sampling needs m >= 8");
  const auto& box = dom.box;
  const Expression& g = dom.g;
  const double fd_step = 1e-6 * box.diagonal();
  const double grad_floor = 1e-10;

  std::vector<std::array<double, 2>> points;
  auto bisect = [&](std::array<double, 2> p, std::array<double, 2> q, double gp) {
    for (int it = 0; it < 60; ++it) {
      const std::array<double, 2> mid = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
      const double gm = g(mid[0], mid[1]);
      if ((gm < 0.0) == (gp < 0.0)) {
        p = mid;
        gp = gm;
      } else {
        q = mid;
      }
    }
    points.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
  };

  const double dx = (box.xmax - box.xmin) / (m - 1);
  const double dy = (box.ymax - box.ymin) / (m - 1);
  for (int line = 0; line < m; ++line) {
    const double y = box.ymin + line * dy;
    const double x = box.xmin + line * dx;
    for (int k = 0; k + 1 < m; ++k) {
      // horizontal line
      std::array<double, 2> p = {box.xmin + k * dx, y};
      std::array<double, 2> q = {box.xmin + (k + 1) * dx, y};
      double gp = g(p[0], p[1]);
      double gq = g(q[0], q[1]);
      if ((gp < 0.0) != (gq < 0.0)) bisect(p, q, gp);
      // vertical line
      p = {x, box.ymin + k * dy};
      q = {x, box.ymin + (k + 1) * dy};
      gp = g(p[0], p[1]);
      gq = g(q[0], q[1]);
      if ((gp < 0.0) != (gq < 0.0)) bisect(p, q, gp);
    }
  }
  if (points.empty()) throw NoBoundaryError("no sign change of g found on the sampling grid");

  std::vector<BoundarySample2D> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const double gx = (g(p[0] + fd_step, p[1]) - g(p[0] - fd_step, p[1])) / (2.0 * fd_step);
    const double gy = (g(p[0], p[1] + fd_step) - g(p[0], p[1] - fd_step)) / (2.0 * fd_step);
    const double norm = std::hypot(gx, gy);
    if (norm < grad_floor) {
      std::ostringstream os;
      os << "|grad g| = " << norm << " at boundary sample (" << p[0] << ", " << p[1] << ")";
      throw SingularGradientError(os.str());
    }
    out.push_back({p, {gx / norm, gy / norm}});
  }
  return out;
}

}  // namespace fraclab
