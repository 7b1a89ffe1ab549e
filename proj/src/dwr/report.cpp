#include <sstream>

#include "dwrnet/dwr/dwr.hpp"

namespace dwrnet::dwr {

namespace {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j;
  j["problem"] = problem;
  j["level"] = level;
  j["grid"] = {nx, ny};
  j["n_int"] = n_int;
  j["n_bnd"] = n_bnd;
  j["functionals"] = names;
  j["J_values_theta"] = j_theta;
  j["J_values_reference"] = opt_json(j_reference);
  j["omega"] = omega;
  j["J_c_theta"] = jc_theta;
  j["J_c_reference"] = opt_json(jc_reference);
  j["eta"] = eta;
  j["true_error"] = opt_json(true_error);
  j["i_eff"] = opt_json(i_eff);
  j["in_band"] = in_band;
  j["cancellation_terms"] = cancellation_terms;
  j["loss_primal"] = loss_primal;
  j["loss_adjoint"] = loss_adjoint;
  j["r_err"] = r_err;
  j["rel_l2"] = opt_json(rel_l2);
  j["seeds"] = {{"primal", seed_primal}, {"adjoint", seed_adjoint}};
  j["net_shapes"] = {{"primal", primal_shape}, {"adjoint", adjoint_shape}};
  j["line_search_failed"] = {{"primal", primal_line_search_failed}, {"adjoint", adjoint_line_search_failed}};
  j["error"] = error.empty() ? nlohmann::json(nullptr) : nlohmann::json(error);
  j["error_code"] = error_code;
  return j;
}

EstimateReport EstimateReport::from_json(const nlohmann::json& j) {
  EstimateReport r;
  try {
    r.problem = j.at("problem").get<std::string>();
    r.level = j.at("level").get<int>();
    r.nx = j.at("grid").at(0).get<int>();
    r.ny = j.at("grid").at(1).get<int>();
    r.n_int = j.at("n_int").get<std::size_t>();
    r.n_bnd = j.at("n_bnd").get<std::size_t>();
    r.names = j.at("functionals").get<std::vector<std::string>>();
    r.j_theta = j.at("J_values_theta").get<std::vector<double>>();
    r.j_reference = opt_from<std::vector<double>>(j, "J_values_reference");
    r.omega = j.at("omega").get<std::vector<double>>();
    r.jc_theta = j.at("J_c_theta").get<double>();
    r.jc_reference = opt_from<double>(j, "J_c_reference");
    r.eta = j.at("eta").get<double>();
    r.true_error = opt_from<double>(j, "true_error");
    r.i_eff = opt_from<double>(j, "i_eff");
    r.in_band = j.at("in_band").get<bool>();
    r.cancellation_terms = j.at("cancellation_terms").get<std::vector<double>>();
    r.loss_primal = j.at("loss_primal").get<double>();
    r.loss_adjoint = j.at("loss_adjoint").get<double>();
    r.r_err = j.at("r_err").get<double>();
    r.rel_l2 = opt_from<double>(j, "rel_l2");
    r.seed_primal = j.at("seeds").at("primal").get<std::uint64_t>();
    r.seed_adjoint = j.at("seeds").at("adjoint").get<std::uint64_t>();
    r.primal_shape = j.at("net_shapes").at("primal").get<std::vector<int>>();
    r.adjoint_shape = j.at("net_shapes").at("adjoint").get<std::vector<int>>();
    r.primal_line_search_failed = j.at("line_search_failed").at("primal").get<bool>();
    r.adjoint_line_search_failed = j.at("line_search_failed").at("adjoint").get<bool>();
    r.error = j.at("error").is_null() ? "" : j.at("error").get<std::string>();
    r.error_code = j.at("error_code").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string sweep_csv(const std::vector<EstimateReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "level,n_int,n_bnd,J_c_theta,eta,e,i_eff,loss_primal,loss_adjoint,seconds\n";
  for (const auto& r : reports) {
    os << r.level << ',' << r.n_int << ',' << r.n_bnd << ',' << r.jc_theta << ',' << r.eta << ',';
    if (r.true_error) os << *r.true_error;
    os << ',';
    if (r.i_eff) os << *r.i_eff;
    os << ',' << r.loss_primal << ',' << r.loss_adjoint << ',' << r.seconds << '\n';
  }
  return os.str();
}

}  // namespace dwrnet::dwr
