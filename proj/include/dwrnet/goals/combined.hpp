#pragma once

#include <span>
#include <string>
#include <vector>

#include "dwrnet/goals/functional.hpp"

namespace dwrnet::goals {

enum class SignSource { reference_values, fixed_positive, estimated };

SignSource parse_sign_source(const std::string& name);
std::string to_string(SignSource s);

/// J_c = sum_n omega_n J_n with omega_n = sign_n w_n / |J_n(u_theta)|.
struct CombinedFunctional {
  std::vector<GoalFunctional> parts;
  std::vector<double> w;
  SignSource sign_source = SignSource::fixed_positive;
  std::vector<double> reference;  // J_n(u), required by reference_values

  /// Throws ConfigError listing every violation.
  void validate() const;
};

/// `estimated_signs` supplies sign_n for SignSource::estimated. Equal values
/// count as a positive sign.
std::vector<double> combine_weights(const CombinedFunctional& jc, std::span<const double> j_theta,
                                    std::span<const double> estimated_signs = {});

double combined_value(std::span<const double> omega, std::span<const double> j_values);

}  // namespace dwrnet::goals
