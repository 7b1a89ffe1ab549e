#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dwrnet/common.hpp"
#include "dwrnet/geometry/nurbs.hpp"

namespace dwrnet::geo {

enum class BcTag { dirichlet, neumann_x, neumann_y };

BcTag parse_bc_tag(const std::string& name);
std::string to_string(BcTag tag);

/// A boundary curve c(t), t in [0, 1], traversed with the domain on its left,
/// so the outward normal is the tangent rotated clockwise.
struct BoundarySegment {
  std::string group;
  BcTag tag = BcTag::dirichlet;
  std::function<Vec2(double)> point;
  std::function<Vec2(double)> tangent;  // dc/dt
  double length = 0.0;
  bool constant_speed = true;

  Vec2 normal(double t) const;
  /// Parameter t at arc length s from the start (inverted numerically when
  /// the speed varies).
  double param_at_length(double s) const;
};

/// Smooth parametric map from [0,1]^2 onto part of the domain.
struct Patch {
  std::function<Vec2(double, double)> map;
  /// {dx/du, dx/dv, dy/du, dy/dv}
  std::function<std::array<double, 4>(double, double)> jacobian;
};

/// Half-plane a x > b y.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double eval(const Vec2& x) const { return a * x[0] - b * x[1]; }
};

enum class DomainKind { quarter_disc_pair, ns_frame, nurbs_mapped, rectangle };

std::string to_string(DomainKind kind);

class Domain {
 public:
  DomainKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Strict interior test including all half-plane cuts.
  bool inside(const Vec2& x) const;
  std::array<double, 4> bbox() const { return bbox_; }  // xmin, xmax, ymin, ymax
  const std::vector<BoundarySegment>& segments() const { return segments_; }
  const std::vector<Patch>& patches() const { return patches_; }
  const std::vector<HalfPlane>& cuts() const { return cuts_; }
  std::vector<std::string> groups() const;
  bool has_group(const std::string& group) const;

  /// Assigns a boundary condition to every segment of a group.
  void set_bc(const std::string& group, BcTag tag);
  /// Signed-distance-like function for the boundary equation; zero on the
  /// boundary (used by tests).
  double boundary_residual(const Vec2& x) const { return boundary_eq_(x); }

  static Domain quarter_disc_pair();
  static Domain ns_frame();
  static Domain nurbs_mapped(NurbsSurface surface, std::function<bool(const Vec2&)> inside = {});
  static Domain unit_disc();
  static Domain rectangle(double x0, double x1, double y0, double y1);

  friend Domain subdomain_restrict(const Domain& d, double a, double b);

 private:
  DomainKind kind_ = DomainKind::rectangle;
  std::string name_;
  std::function<bool(const Vec2&)> inside_base_;
  std::function<double(const Vec2&)> boundary_eq_;
  std::array<double, 4> bbox_{};
  std::vector<BoundarySegment> segments_;
  std::vector<Patch> patches_;
  std::vector<HalfPlane> cuts_;
};

/// Omega ∩ {a x > b y}. The result keeps the parent's patches and records
/// the cut; quadrature splits cells along it. Boundary segments are dropped.
Domain subdomain_restrict(const Domain& d, double a, double b);

}  // namespace dwrnet::geo
