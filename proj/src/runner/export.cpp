#include <cmath>
#include <fstream>
#include <sstream>

#include "dwrnet/geometry/collocation.hpp"
#include "dwrnet/runner/runner.hpp"

namespace dwrnet::run {

std::string pointcloud_csv(const pde::Field& field, int component, const geo::Domain& domain, int n,
                           const pde::Field* exact) {
  if (n < 2) throw ConfigError("point cloud grid needs at least 2 points per axis");
  if (component < 0 || component >= field.n_components()) throw StructuralError("point cloud component out of range");
  const auto pts = geo::grid_points(domain, n, n);
  const auto c = static_cast<std::size_t>(component);
  const auto nc = static_cast<std::size_t>(field.n_components());
  const auto vals = field.jets(pts);
  std::vector<ad::SpatialJet2> ex;
  if (exact) ex = exact->jets(pts);
  const auto ne = exact ? static_cast<std::size_t>(exact->n_components()) : 0;
  std::ostringstream os;
  os.precision(17);
  os << (exact ? "x,y,value,exact,abs_err\n" : "x,y,value\n");
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const double v = vals[p * nc + c].value;
    os << pts[p][0] << ',' << pts[p][1] << ',' << v;
    if (exact) {
      const double e = ex[p * ne + c].value;
      os << ',' << e << ',' << std::abs(v - e);
    }
    os << '\n';
  }
  return os.str();
}

void export_pointcloud(const pde::Field& field, int component, const geo::Domain& domain, int n,
                       const std::filesystem::path& path, const pde::Field* exact) {
  const std::string csv = pointcloud_csv(field, component, domain, n, exact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write point cloud " + path.string());
  out << csv;
  if (!out) throw IoError("failed writing point cloud " + path.string());
}

}  // namespace dwrnet::run
