#include "dwrnet/geometry/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dwrnet/geometry/gauss.hpp"

namespace dwrnet::geo {

BcTag parse_bc_tag(const std::string& name) {
  if (name == "dirichlet") return BcTag::dirichlet;
  if (name == "neumann_x") return BcTag::neumann_x;
  if (name == "neumann_y") return BcTag::neumann_y;
  throw ConfigError("unknown boundary condition tag '" + name + "'");
}

std::string to_string(BcTag tag) {
  switch (tag) {
    case BcTag::dirichlet: return "dirichlet";
    case BcTag::neumann_x: return "neumann_x";
    case BcTag::neumann_y: return "neumann_y";
  }
  return "dirichlet";
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::quarter_disc_pair: return "quarter_disc_pair";
    case DomainKind::ns_frame: return "ns_frame";
    case DomainKind::nurbs_mapped: return "nurbs_mapped";
    case DomainKind::rectangle: return "rectangle";
  }
  return "rectangle";
}

namespace {

double integrate_speed(const BoundarySegment& seg, double t0, double t1, int pieces) {
  static const GaussRule1D rule = gauss_legendre(12);
  double total = 0.0;
  const double h = (t1 - t0) / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double a = t0 + k * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = a + 0.5 * h * (rule.nodes[q] + 1.0);
      total += 0.5 * h * rule.weights[q] * norm(seg.tangent(t));
    }
  }
  return total;
}

BoundarySegment line_segment(Vec2 p0, Vec2 p1, std::string group) {
  BoundarySegment s;
  s.group = std::move(group);
  s.point = [p0, p1](double t) { return p0 + t * (p1 - p0); };
  s.tangent = [p0, p1](double) { return p1 - p0; };
  s.length = norm(p1 - p0);
  return s;
}

// Unit-circle arc from angle th0 to th1 (counterclockwise if th1 > th0).
BoundarySegment arc_segment(double th0, double th1, std::string group) {
  BoundarySegment s;
  s.group = std::move(group);
  s.point = [th0, th1](double t) {
    const double th = th0 + t * (th1 - th0);
    return Vec2{std::cos(th), std::sin(th)};
  };
  s.tangent = [th0, th1](double t) {
    const double th = th0 + t * (th1 - th0);
    return Vec2{-(th1 - th0) * std::sin(th), (th1 - th0) * std::cos(th)};
  };
  s.length = std::abs(th1 - th0);
  return s;
}

Patch rect_patch(double x0, double x1, double y0, double y1) {
  Patch p;
  p.map = [=](double u, double v) { return Vec2{x0 + u * (x1 - x0), y0 + v * (y1 - y0)}; };
  p.jacobian = [=](double, double) { return std::array<double, 4>{x1 - x0, 0.0, 0.0, y1 - y0}; };
  return p;
}

Patch polar_patch(double th0, double th1) {
  Patch p;
  const double d = th1 - th0;
  p.map = [=](double u, double v) {
    const double th = th0 + v * d;
    return Vec2{u * std::cos(th), u * std::sin(th)};
  };
  p.jacobian = [=](double u, double v) {
    const double th = th0 + v * d;
    return std::array<double, 4>{std::cos(th), -u * d * std::sin(th), std::sin(th), u * d * std::cos(th)};
  };
  return p;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a[1] > x[1]) != (b[1] > x[1]) && x[0] < (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
  }
  return in;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& x) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  double t = l2 > 0.0 ? dot(x - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(x - (a + t * ab));
}

}  // namespace

Vec2 BoundarySegment::normal(double t) const {
  const Vec2 d = tangent(t);
  const double n = norm(d);
  return {d[1] / n, -d[0] / n};
}

double BoundarySegment::param_at_length(double s) const {
  if (constant_speed) return std::clamp(s / length, 0.0, 1.0);
  if (s <= 0.0) return 0.0;
  if (s >= length) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (integrate_speed(*this, 0.0, mid, 8) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool Domain::inside(const Vec2& x) const {
  if (!inside_base_(x)) return false;
  for (const auto& c : cuts_) {
    if (!(c.eval(x) > 0.0)) return false;
  }
  return true;
}

std::vector<std::string> Domain::groups() const {
  std::vector<std::string> out;
  for (const auto& s : segments_) {
    if (std::find(out.begin(), out.end(), s.group) == out.end()) out.push_back(s.group);
  }
  return out;
}

bool Domain::has_group(const std::string& group) const {
  return std::any_of(segments_.begin(), segments_.end(), [&](const BoundarySegment& s) { return s.group == group; });
}

void Domain::set_bc(const std::string& group, BcTag tag) {
  bool found = false;
  for (auto& s : segments_) {
    if (s.group == group) {
      s.tag = tag;
      found = true;
    }
  }
  if (!found) throw ConfigError("domain " + name_ + " has no boundary group '" + group + "'");
}

Domain Domain::quarter_disc_pair() {
  using std::numbers::pi;
  Domain d;
  d.kind_ = DomainKind::quarter_disc_pair;
  d.name_ = "quarter_disc_pair";
  d.inside_base_ = [](const Vec2& x) { return x[0] * x[0] + x[1] * x[1] < 1.0 && x[0] * x[1] < 0.0; };
  d.boundary_eq_ = [](const Vec2& x) {
    return std::min({std::abs(std::hypot(x[0], x[1]) - 1.0), std::abs(x[0]), std::abs(x[1])});
  };
  d.bbox_ = {-1.0, 1.0, -1.0, 1.0};
  // Second quadrant, counterclockwise from the origin.
  d.segments_.push_back(line_segment({0.0, 0.0}, {0.0, 1.0}, "y_axis"));
  d.segments_.push_back(arc_segment(pi / 2, pi, "arc"));
  d.segments_.push_back(line_segment({-1.0, 0.0}, {0.0, 0.0}, "x_axis"));
  // Fourth quadrant.
  d.segments_.push_back(line_segment({0.0, 0.0}, {0.0, -1.0}, "y_axis"));
  d.segments_.push_back(arc_segment(3 * pi / 2, 2 * pi, "arc"));
  d.segments_.push_back(line_segment({1.0, 0.0}, {0.0, 0.0}, "x_axis"));
  d.patches_.push_back(polar_patch(pi / 2, pi));
  d.patches_.push_back(polar_patch(3 * pi / 2, 2 * pi));
  return d;
}

Domain Domain::ns_frame() {
  Domain d;
  d.kind_ = DomainKind::ns_frame;
  d.name_ = "ns_frame";
  d.inside_base_ = [](const Vec2& x) {
    const double m = std::max(std::abs(x[0]), std::abs(x[1]));
    return m < 1.0 && m > 0.5;
  };
  d.boundary_eq_ = [](const Vec2& x) {
    const double m = std::max(std::abs(x[0]), std::abs(x[1]));
    return std::min(std::abs(m - 1.0), std::abs(m - 0.5));
  };
  d.bbox_ = {-1.0, 1.0, -1.0, 1.0};
  const Vec2 o[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int k = 0; k < 4; ++k) d.segments_.push_back(line_segment(o[k], o[(k + 1) % 4], "outer"));
  // Hole: clockwise so the domain stays on the left.
  const Vec2 h[4] = {{-0.5, -0.5}, {-0.5, 0.5}, {0.5, 0.5}, {0.5, -0.5}};
  for (int k = 0; k < 4; ++k) d.segments_.push_back(line_segment(h[k], h[(k + 1) % 4], "inner"));
  d.patches_.push_back(rect_patch(-1.0, 1.0, -1.0, -0.5));
  d.patches_.push_back(rect_patch(-1.0, 1.0, 0.5, 1.0));
  d.patches_.push_back(rect_patch(-1.0, -0.5, -0.5, 0.5));
  d.patches_.push_back(rect_patch(0.5, 1.0, -0.5, 0.5));
  return d;
}

Domain Domain::nurbs_mapped(NurbsSurface surface, std::function<bool(const Vec2&)> inside) {
  surface.validate();
  Domain d;
  d.kind_ = DomainKind::nurbs_mapped;
  d.name_ = "nurbs_mapped";
  const double u0 = surface.u_min(), u1 = surface.u_max(), v0 = surface.v_min(), v1 = surface.v_max();
  for (int s = 0; s < 4; ++s) {
    const NurbsCurve c = surface.side(s);
    const double a = c.xi_min(), b = c.xi_max();
    const bool reversed = s >= 2;
    BoundarySegment seg;
    seg.group = "side" + std::to_string(s);
    seg.constant_speed = false;
    seg.point = [c, a, b, reversed](double t) { return c.eval(a + (reversed ? 1.0 - t : t) * (b - a)); };
    seg.tangent = [c, a, b, reversed](double t) {
      const Vec2 d1 = c.derivative(a + (reversed ? 1.0 - t : t) * (b - a));
      return (reversed ? -(b - a) : (b - a)) * d1;
    };
    seg.length = integrate_speed(seg, 0.0, 1.0, 32);
    d.segments_.push_back(std::move(seg));
  }
  std::vector<Vec2> poly;
  const int per_side = 400;
  for (const auto& seg : d.segments_) {
    for (int k = 0; k < per_side; ++k) poly.push_back(seg.point(static_cast<double>(k) / per_side));
  }
  double xmin = poly[0][0], xmax = xmin, ymin = poly[0][1], ymax = ymin;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  d.bbox_ = {xmin, xmax, ymin, ymax};
  if (inside)
    d.inside_base_ = std::move(inside);
  else
    d.inside_base_ = [poly](const Vec2& x) { return point_in_polygon(poly, x); };
  d.boundary_eq_ = [poly](const Vec2& x) {
    double best = 1e300;
    for (std::size_t i = 0; i < poly.size(); ++i) best = std::min(best, segment_distance(poly[i], poly[(i + 1) % poly.size()], x));
    return best;
  };
  Patch p;
  p.map = [surface, u0, u1, v0, v1](double u, double v) { return surface.eval(u0 + u * (u1 - u0), v0 + v * (v1 - v0)); };
  p.jacobian = [surface, u0, u1, v0, v1](double u, double v) {
    auto j = surface.jacobian(u0 + u * (u1 - u0), v0 + v * (v1 - v0));
    return std::array<double, 4>{j[0] * (u1 - u0), j[1] * (v1 - v0), j[2] * (u1 - u0), j[3] * (v1 - v0)};
  };
  d.patches_.push_back(std::move(p));
  return d;
}

Domain Domain::unit_disc() {
  Domain d = nurbs_mapped(unit_disc_surface(), [](const Vec2& x) { return x[0] * x[0] + x[1] * x[1] < 1.0; });
  d.name_ = "unit_disc";
  d.boundary_eq_ = [](const Vec2& x) { return std::abs(std::hypot(x[0], x[1]) - 1.0); };
  d.bbox_ = {-1.0, 1.0, -1.0, 1.0};
  for (auto& s : d.segments_) s.group = "boundary";
  return d;
}

Domain Domain::rectangle(double x0, double x1, double y0, double y1) {
  if (!(x0 < x1 && y0 < y1)) throw GeometryError("rectangle: need x0 < x1 and y0 < y1");
  Domain d;
  d.kind_ = DomainKind::rectangle;
  d.name_ = "rectangle";
  d.inside_base_ = [=](const Vec2& x) { return x[0] > x0 && x[0] < x1 && x[1] > y0 && x[1] < y1; };
  d.boundary_eq_ = [=](const Vec2& x) {
    return std::min({std::abs(x[0] - x0), std::abs(x[0] - x1), std::abs(x[1] - y0), std::abs(x[1] - y1)});
  };
  d.bbox_ = {x0, x1, y0, y1};
  d.segments_.push_back(line_segment({x0, y0}, {x1, y0}, "bottom"));
  d.segments_.push_back(line_segment({x1, y0}, {x1, y1}, "right"));
  d.segments_.push_back(line_segment({x1, y1}, {x0, y1}, "top"));
  d.segments_.push_back(line_segment({x0, y1}, {x0, y0}, "left"));
  d.patches_.push_back(rect_patch(x0, x1, y0, y1));
  return d;
}

Domain subdomain_restrict(const Domain& d, double a, double b) {
  if (a == 0.0 && b == 0.0) throw GeometryError("subdomain_restrict: (a, b) must not be (0, 0)");
  Domain r = d;
  r.cuts_.push_back({a, b});
  r.segments_.clear();
  return r;
}

}  // namespace dwrnet::geo
