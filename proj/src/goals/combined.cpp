#include "dwrnet/goals/combined.hpp"

#include <cmath>
#include <sstream>

namespace dwrnet::goals {

SignSource parse_sign_source(const std::string& name) {
  if (name == "reference_values") return SignSource::reference_values;
  if (name == "fixed_positive") return SignSource::fixed_positive;
  if (name == "estimated") return SignSource::estimated;
  throw ConfigError("unknown sign_source '" + name + "'");
}

std::string to_string(SignSource s) {
  switch (s) {
    case SignSource::reference_values: return "reference_values";
    case SignSource::fixed_positive: return "fixed_positive";
    case SignSource::estimated: return "estimated";
  }
  return "fixed_positive";
}

void CombinedFunctional::validate() const {
  std::vector<std::string> bad;
  if (parts.empty()) bad.emplace_back("a combined functional needs at least one part");
  if (w.size() != parts.size()) bad.emplace_back("one weight per functional is required");
  for (double x : w) {
    if (!(x > 0.0)) {
      bad.emplace_back("weights must be positive");
      break;
    }
  }
  if (!reference.empty() && reference.size() != parts.size())
    bad.emplace_back("give one reference value per functional");
  if (!bad.empty()) {
    std::string msg = "invalid combined functional:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg, bad);
  }
}

std::vector<double> combine_weights(const CombinedFunctional& jc, std::span<const double> j_theta,
                                    std::span<const double> estimated_signs) {
  jc.validate();
  if (j_theta.size() != jc.parts.size()) throw FunctionalError("combine_weights: one value per functional is required");
  if (jc.sign_source == SignSource::reference_values && jc.reference.size() != jc.parts.size())
    throw FunctionalError("combine_weights: sign_source reference_values needs reference values");
  if (jc.sign_source == SignSource::estimated && estimated_signs.size() != jc.parts.size())
    throw FunctionalError("combine_weights: estimated signs missing");
  std::vector<double> omega(jc.parts.size());
  for (std::size_t n = 0; n < jc.parts.size(); ++n) {
    if (!(std::abs(j_theta[n]) > 1e-14)) {
      std::ostringstream msg;
      msg << "functional '" << jc.parts[n].name << "' has |J(u_theta)| = " << std::abs(j_theta[n])
          << " <= 1e-14; its combination weight is undefined";
      throw FunctionalError(msg.str());
    }
    double sign = 1.0;
    if (jc.sign_source == SignSource::reference_values)
      sign = jc.reference[n] - j_theta[n] < 0.0 ? -1.0 : 1.0;
    else if (jc.sign_source == SignSource::estimated)
      sign = estimated_signs[n] < 0.0 ? -1.0 : 1.0;
    omega[n] = sign * jc.w[n] / std::abs(j_theta[n]);
  }
  return omega;
}

double combined_value(std::span<const double> omega, std::span<const double> j_values) {
  if (omega.size() != j_values.size()) throw FunctionalError("combined_value: size mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < omega.size(); ++n) s += omega[n] * j_values[n];
  return s;
}

}  // namespace dwrnet::goals
