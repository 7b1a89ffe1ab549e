#include "dwrnet/autodiff/activation.hpp"

#include <cmath>

#include "dwrnet/autodiff/tape.hpp"
#include "dwrnet/common.hpp"

namespace dwrnet::ad {

ActivationDerivs activate(Activation act, double t) {
  switch (act) {
    case Activation::tanh: {
      const double y = std::tanh(t);
      const double s = 1.0 - y * y;
      return {y, s, -2.0 * y * s, s * (6.0 * y * y - 2.0)};
    }
    case Activation::sigmoid: {
      const double y = detail::sigmoid(t);
      const double d1 = y * (1.0 - y);
      return {y, d1, d1 * (1.0 - 2.0 * y), d1 * (1.0 - 6.0 * y + 6.0 * y * y)};
    }
    case Activation::swish: {
      const double s = detail::sigmoid(t);
      const double s1 = s * (1.0 - s);
      const double s2 = s1 * (1.0 - 2.0 * s);
      const double s3 = s1 * (1.0 - 6.0 * s + 6.0 * s * s);
      return {t * s, s + t * s1, 2.0 * s1 + t * s2, 3.0 * s2 + t * s3};
    }
    case Activation::linear:
      return {t, 1.0, 0.0, 0.0};
  }
  return {t, 1.0, 0.0, 0.0};
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "swish") return Activation::swish;
  if (name == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::swish:
      return "swish";
    case Activation::linear:
      return "linear";
  }
  return "linear";
}

}  // namespace dwrnet::ad
