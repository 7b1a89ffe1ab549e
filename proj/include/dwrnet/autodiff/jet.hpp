#pragma once

#include <array>
#include <cmath>

namespace dwrnet::ad {

/// Second-order forward-mode value in two spatial inputs: u, grad u and the
/// full (symmetric) Hessian. T is double for plain evaluation or a tape
/// variable when the jet components feed a reverse sweep.
template <class T>
struct Jet {
  T value{};
  std::array<T, 2> grad{};
  std::array<std::array<T, 2>, 2> hess{};

  static Jet constant(T v) {
    Jet j;
    j.value = v;
    return j;
  }

  /// Seeds coordinate `axis` (0 = x, 1 = y) at value v.
  static Jet variable(T v, int axis) {
    Jet j;
    j.value = v;
    j.grad[axis] = T(1.0);
    return j;
  }

  T laplacian() const { return hess[0][0] + hess[1][1]; }
};

using SpatialJet2 = Jet<double>;

// Chain rule for a scalar function with derivatives (f, f', f'') at a.value.
template <class T>
Jet<T> chain(const Jet<T>& a, T f, T d1, T d2) {
  Jet<T> r;
  r.value = f;
  for (int k = 0; k < 2; ++k) r.grad[k] = d1 * a.grad[k];
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) r.hess[k][l] = d2 * a.grad[k] * a.grad[l] + d1 * a.hess[k][l];
  }
  return r;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r;
  r.value = a.value + b.value;
  for (int k = 0; k < 2; ++k) {
    r.grad[k] = a.grad[k] + b.grad[k];
    for (int l = 0; l < 2; ++l) r.hess[k][l] = a.hess[k][l] + b.hess[k][l];
  }
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  Jet<T> r;
  r.value = -a.value;
  for (int k = 0; k < 2; ++k) {
    r.grad[k] = -a.grad[k];
    for (int l = 0; l < 2; ++l) r.hess[k][l] = -a.hess[k][l];
  }
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r;
  r.value = a.value - b.value;
  for (int k = 0; k < 2; ++k) {
    r.grad[k] = a.grad[k] - b.grad[k];
    for (int l = 0; l < 2; ++l) r.hess[k][l] = a.hess[k][l] - b.hess[k][l];
  }
  return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r;
  r.value = a.value * b.value;
  for (int k = 0; k < 2; ++k) r.grad[k] = a.value * b.grad[k] + b.value * a.grad[k];
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      r.hess[k][l] = a.value * b.hess[k][l] + b.value * a.hess[k][l] + a.grad[k] * b.grad[l] +
                     a.grad[l] * b.grad[k];
    }
  }
  return r;
}

template <class T>
Jet<T> operator*(T s, const Jet<T>& a) {
  Jet<T> r;
  r.value = s * a.value;
  for (int k = 0; k < 2; ++k) {
    r.grad[k] = s * a.grad[k];
    for (int l = 0; l < 2; ++l) r.hess[k][l] = s * a.hess[k][l];
  }
  return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, T s) {
  return s * a;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, T s) {
  Jet<T> r = a;
  r.value = r.value + s;
  return r;
}

template <class T>
Jet<T> operator+(T s, const Jet<T>& a) {
  return a + s;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, T s) {
  Jet<T> r = a;
  r.value = r.value - s;
  return r;
}

template <class T>
Jet<T> operator-(T s, const Jet<T>& a) {
  return -a + s;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  using std::pow;
  T inv = T(1.0) / a.value;
  return chain(a, inv, -inv * inv, T(2.0) * inv * inv * inv);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, T s) {
  return (T(1.0) / s) * a;
}

template <class T>
Jet<T> operator/(T s, const Jet<T>& a) {
  return s * reciprocal(a);
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  T e = exp(a.value);
  return chain(a, e, e, e);
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  using std::log;
  T inv = T(1.0) / a.value;
  return chain(a, log(a.value), inv, -inv * inv);
}

template <class T>
Jet<T> sin(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  T s = sin(a.value);
  return chain(a, s, cos(a.value), -s);
}

template <class T>
Jet<T> cos(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.value);
  return chain(a, c, -sin(a.value), -c);
}

template <class T>
Jet<T> tanh(const Jet<T>& a) {
  using std::tanh;
  T t = tanh(a.value);
  T d1 = T(1.0) - t * t;
  return chain(a, t, d1, T(-2.0) * t * d1);
}

template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
  using std::pow;
  T f = pow(a.value, p);
  T d1 = T(p) * pow(a.value, p - 1.0);
  T d2 = T(p * (p - 1.0)) * pow(a.value, p - 2.0);
  return chain(a, f, d1, d2);
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  return pow(a, 0.5);
}

}  // namespace dwrnet::ad
