#include "dwrnet/geometry/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwrnet/geometry/gauss.hpp"

namespace dwrnet::geo {

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  normals.insert(normals.end(), other.normals.begin(), other.normals.end());
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

namespace {

using UV = std::array<double, 2>;

struct Integrator {
  const Patch& patch;
  const std::vector<HalfPlane>& cuts;
  GaussRule1D rule;
  GaussRule1D rule_s;  // one extra point for the collapsed direction
  QuadratureRule& out;

  double level(const HalfPlane& c, const UV& p) const { return c.eval(patch.map(p[0], p[1])); }

  void emit(const UV& p, double w) {
    const auto j = patch.jacobian(p[0], p[1]);
    const double det = std::abs(j[0] * j[3] - j[1] * j[2]);
    if (det < 1e-14) {
      std::ostringstream msg;
      msg << "quadrature: nearly singular Jacobian at parameter (" << p[0] << ", " << p[1] << ")";
      throw GeometryError(msg.str());
    }
    out.nodes.push_back(patch.map(p[0], p[1]));
    out.weights.push_back(w * det);
  }

  void tensor(double u0, double u1, double v0, double v1) {
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
      const double u = u0 + 0.5 * (u1 - u0) * (rule.nodes[a] + 1.0);
      for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
        const double v = v0 + 0.5 * (v1 - v0) * (rule.nodes[b] + 1.0);
        emit({u, v}, 0.25 * (u1 - u0) * (v1 - v0) * rule.weights[a] * rule.weights[b]);
      }
    }
  }

  // Collapsed (Duffy) rule on triangle (A, B, C).
  void triangle(const UV& A, const UV& B, const UV& C) {
    const double e1x = B[0] - A[0], e1y = B[1] - A[1];
    const double e2x = C[0] - B[0], e2y = C[1] - B[1];
    const double area2 = std::abs(e1x * e2y - e1y * e2x);
    if (area2 == 0.0) return;
    for (std::size_t a = 0; a < rule_s.nodes.size(); ++a) {
      const double s = 0.5 * (rule_s.nodes[a] + 1.0);
      for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
        const double t = 0.5 * (rule.nodes[b] + 1.0);
        const UV p{A[0] + s * e1x + s * t * e2x, A[1] + s * e1y + s * t * e2y};
        emit(p, 0.25 * rule_s.weights[a] * rule.weights[b] * s * area2);
      }
    }
  }

  // Sutherland–Hodgman clip by {level >= 0}; crossings found by bisection.
  std::vector<UV> clip(const std::vector<UV>& poly, const HalfPlane& c) const {
    std::vector<UV> res;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const UV& P = poly[i];
      const UV& Q = poly[(i + 1) % n];
      const double hp = level(c, P), hq = level(c, Q);
      const bool pin = hp >= 0.0, qin = hq >= 0.0;
      if (pin && qin) {
        res.push_back(Q);
      } else if (pin != qin) {
        double lo = 0.0, hi = 1.0;  // lo on P's side
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (lo + hi);
          const UV M{P[0] + m * (Q[0] - P[0]), P[1] + m * (Q[1] - P[1])};
          if ((level(c, M) >= 0.0) == pin)
            lo = m;
          else
            hi = m;
        }
        const double m = 0.5 * (lo + hi);
        res.push_back({P[0] + m * (Q[0] - P[0]), P[1] + m * (Q[1] - P[1])});
        if (qin) res.push_back(Q);
      }
    }
    return res;
  }

  // -1 fully outside (no positive sample), +1 fully inside, 0 straddling.
  int classify(double u0, double u1, double v0, double v1) const {
    bool any_neg = false;
    for (const auto& c : cuts) {
      bool pos = false, neg = false;
      for (int a = 0; a <= 2; ++a) {
        for (int b = 0; b <= 2; ++b) {
          const double h = level(c, {u0 + 0.5 * a * (u1 - u0), v0 + 0.5 * b * (v1 - v0)});
          if (h > 0.0) pos = true;
          if (h < 0.0) neg = true;
        }
      }
      if (!pos) return -1;
      if (neg) any_neg = true;
    }
    return any_neg ? 0 : 1;
  }

  void cell(double u0, double u1, double v0, double v1, int depth) {
    const int cls = classify(u0, u1, v0, v1);
    if (cls < 0) return;
    if (cls > 0) {
      tensor(u0, u1, v0, v1);
      return;
    }
    if (depth > 0) {
      const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
      cell(u0, um, v0, vm, depth - 1);
      cell(um, u1, v0, vm, depth - 1);
      cell(u0, um, vm, v1, depth - 1);
      cell(um, u1, vm, v1, depth - 1);
      return;
    }
    std::vector<UV> poly{{u0, v0}, {u1, v0}, {u1, v1}, {u0, v1}};
    for (const auto& c : cuts) {
      poly = clip(poly, c);
      if (poly.size() < 3) return;
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) triangle(poly[0], poly[k], poly[k + 1]);
  }
};

}  // namespace

QuadratureRule gauss_quadrature(const Domain& domain, int order, int cells, int refine) {
  if (order < 1) throw GeometryError("gauss_quadrature: order must be at least 1");
  if (cells < 1) throw GeometryError("gauss_quadrature: cells must be at least 1");
  QuadratureRule out;
  for (const auto& patch : domain.patches()) {
    Integrator it{patch, domain.cuts(), gauss_legendre(order), gauss_legendre(order + 1), out};
    for (int a = 0; a < cells; ++a) {
      for (int b = 0; b < cells; ++b) {
        it.cell(static_cast<double>(a) / cells, static_cast<double>(a + 1) / cells, static_cast<double>(b) / cells,
                static_cast<double>(b + 1) / cells, refine);
      }
    }
  }
  return out;
}

QuadratureRule boundary_quadrature(const Domain& domain, std::size_t segment, int order, int pieces) {
  if (segment >= domain.segments().size()) throw GeometryError("boundary_quadrature: no such segment");
  if (order < 1 || pieces < 1) throw GeometryError("boundary_quadrature: order and pieces must be positive");
  const auto& seg = domain.segments()[segment];
  const GaussRule1D rule = gauss_legendre(order);
  QuadratureRule out;
  for (int k = 0; k < pieces; ++k) {
    const double t0 = static_cast<double>(k) / pieces, t1 = static_cast<double>(k + 1) / pieces;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = t0 + 0.5 * (t1 - t0) * (rule.nodes[q] + 1.0);
      out.nodes.push_back(seg.point(t));
      out.weights.push_back(0.5 * (t1 - t0) * rule.weights[q] * norm(seg.tangent(t)));
      out.normals.push_back(seg.normal(t));
      out.segments.push_back(static_cast<int>(segment));
    }
  }
  return out;
}

QuadratureRule boundary_quadrature(const Domain& domain, const std::vector<std::string>& groups, int order,
                                   int pieces) {
  QuadratureRule out;
  for (const auto& g : groups) {
    if (!domain.has_group(g)) throw GeometryError("domain " + domain.name() + " has no boundary group '" + g + "'");
  }
  for (std::size_t s = 0; s < domain.segments().size(); ++s) {
    const auto& seg = domain.segments()[s];
    if (!groups.empty() && std::find(groups.begin(), groups.end(), seg.group) == groups.end()) continue;
    out.append(boundary_quadrature(domain, s, order, pieces));
  }
  return out;
}

}  // namespace dwrnet::geo
