#pragma once

#include <string>
#include <string_view>

namespace dwrnet::ad {

enum class Activation { tanh, sigmoid, swish, linear };

/// f and its first three derivatives at one argument. The third derivative
/// is needed by the reverse sweep through a second-order jet.
struct ActivationDerivs {
  double f;
  double d1;
  double d2;
  double d3;
};

ActivationDerivs activate(Activation act, double t);

Activation parse_activation(std::string_view name);
std::string to_string(Activation act);

}  // namespace dwrnet::ad
