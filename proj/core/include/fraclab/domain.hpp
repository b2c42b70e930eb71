#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "fraclab/expression.hpp"

namespace fraclab {

struct Interval {
  double a;
  double b;
  double length() const { return b - a; }
  bool operator==(const Interval&) const = default;
};

enum class Side { kLeft, kRight };

/// Boundary point of a 1D domain with its outward unit normal (-1 or +1).
struct BoundaryPoint1D {
  double x;
  int normal;
  Side side;
  std::size_t interval;  // index of the interval this point bounds
  bool operator==(const BoundaryPoint1D&) const = default;
};

/// Finite union of disjoint open intervals, sorted and separated by gaps of
/// positive length.
class Domain1D {
 public:
  static Domain1D make(std::vector<std::pair<double, double>> intervals);

  std::span<const Interval> intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  double lower() const { return intervals_.front().a; }
  double upper() const { return intervals_.back().b; }
  double diameter() const { return upper() - lower(); }

  bool contains(double x) const;
  /// Index of the interval containing x, or size() when x is exterior.
  std::size_t locate(double x) const;

  double dist_to_complement(double x) const;
  std::vector<BoundaryPoint1D> boundary_points() const;

  /// Mirror image under x -> -x.
  bool is_symmetric(double tol = 1e-12) const;

  /// Domain with one endpoint displaced by `shift` along its outward normal.
  Domain1D with_moved_endpoint(const BoundaryPoint1D& bp, double shift) const;

  Domain1D scaled(double factor) const;

  bool operator==(const Domain1D&) const = default;

 private:
  explicit Domain1D(std::vector<Interval> iv) : intervals_(std::move(iv)) {}
  std::vector<Interval> intervals_;
};

/// Continuous P1 mesh over a Domain1D. Nodes of each interval include both
/// endpoints; endpoint nodes carry no degree of freedom (u vanishes outside
/// the domain).
class Mesh1D {
 public:
  static Mesh1D make(const Domain1D& domain, int n_per_interval, double beta);

  struct Element {
    double x0;
    double x1;
    int dof0;  // -1 when the node is a domain endpoint
    int dof1;
    std::size_t interval;
    double length() const { return x1 - x0; }
  };

  const Domain1D& domain() const { return domain_; }
  double beta() const { return beta_; }
  int n_per_interval() const { return n_; }

  /// Nodes of interval i, endpoints included.
  std::span<const double> nodes(std::size_t i) const { return nodes_[i]; }
  std::span<const Element> elements() const { return elements_; }

  /// Number of interior (free) nodes.
  int dof_count() const { return static_cast<int>(dof_x_.size()); }
  std::span<const double> dof_coordinates() const { return dof_x_; }

  /// Size of the element adjacent to a boundary point.
  double boundary_element_size(const BoundaryPoint1D& bp) const;

  /// P1 interpolant value at x of the nodal vector u (length dof_count()).
  double interpolate(std::span<const double> u, double x) const;

  /// Index of the mirror dof under x -> -x, or throws AsymmetricMeshError.
  std::vector<int> mirror_map(double tol = 1e-10) const;

 private:
  Mesh1D(Domain1D d, int n, double beta) : domain_(std::move(d)), n_(n), beta_(beta) {}
  Domain1D domain_;
  int n_;
  double beta_;
  std::vector<std::vector<double>> nodes_;
  std::vector<Element> elements_;
  std::vector<double> dof_x_;
};

/// Symmetric endpoint-clustering grading map t^b / (t^b + (1-t)^b).
double grading_map(double t, double beta);

struct BoundingBox2D {
  double xmin, xmax, ymin, ymax;
  double diagonal() const;
};

/// Planar domain {g < 0} restricted to a bounding box.
struct ImplicitDomain2D {
  Expression g;
  BoundingBox2D box;
};

struct BoundarySample2D {
  std::array<double, 2> point;
  std::array<double, 2> normal;
};

/// Samples {g = 0} by sign-change bisection along the lines of an m x m grid.
std::vector<BoundarySample2D> sample_boundary_2d(const ImplicitDomain2D& dom, int m);

}  // namespace fraclab
