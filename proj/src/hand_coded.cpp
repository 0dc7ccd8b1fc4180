#include "stagediff/hand_coded.hpp"

#include <cmath>

namespace stagediff::hand {

double sumexp_order(const double* x, const double* params) {
  const double v = x[0];
  return std::exp(v) + params[0] * std::exp(2.0 * v) + params[1] * std::exp(3.0 * v);
}

double sumexp_terms(const double* x, const double* params) {
  const double v = x[0];
  const int n = static_cast<int>(params[0]);
  double sum = std::exp(v);
  for (int j = 2; j <= n; ++j) {
    const double c = j;
    sum += c * std::exp(c * v);
  }
  return sum;
}

// f = x0 tan(x1 x2) / (tan(x1 x2) - x3)

double mv_f_dx0(const double* x, const double*) {
  const double t = std::tan(x[1] * x[2]);
  return t / (t - x[3]);
}

double mv_f_dx1(const double* x, const double*) {
  const double t = std::tan(x[1] * x[2]);
  const double dt = (1.0 + t * t) * x[2];
  const double d = t - x[3];
  return (x[0] * dt * d - x[0] * t * dt) / (d * d);
}

double mv_f_dx2(const double* x, const double*) {
  const double t = std::tan(x[1] * x[2]);
  const double dt = (1.0 + t * t) * x[1];
  const double d = t - x[3];
  return (x[0] * dt * d - x[0] * t * dt) / (d * d);
}

double mv_f_dx3(const double* x, const double*) {
  const double t = std::tan(x[1] * x[2]);
  const double d = t - x[3];
  return x[0] * t / (d * d);
}

// g = x0 + sqrt(sqrt(x1 + sqrt(x2 + x3)))

double mv_g_dx0(const double*, const double*) { return 1.0; }

double mv_g_dx1(const double* x, const double*) {
  const double su = std::sqrt(x[1] + std::sqrt(x[2] + x[3]));
  return 1.0 / (2.0 * su) / (2.0 * std::sqrt(su));
}

double mv_g_dx2(const double* x, const double*) {
  const double sw = std::sqrt(x[2] + x[3]);
  const double su = std::sqrt(x[1] + sw);
  return 1.0 / (2.0 * sw) / (2.0 * su) / (2.0 * std::sqrt(su));
}

double mv_g_dx3(const double* x, const double* p) { return mv_g_dx2(x, p); }

// x^2 y^3 + y log(x)
double nehmeier1_dx0(const double* x, const double*) {
  const double a = x[1] * x[1] * x[0];
  return (a + a) * x[0] + a * x[0] + std::log(x[1]);
}

double nehmeier1_dx1(const double* x, const double*) {
  return (x[1] + x[1]) * x[0] * x[0] * x[0] + x[0] / x[1];
}

// 3 x^2 y - y^3
double nehmeier2_dx0(const double* x, const double*) {
  return 3.0 * x[1] * x[1] - ((x[0] + x[0]) * x[0] + x[0] * x[0]);
}

double nehmeier2_dx1(const double* x, const double*) {
  const double a = 3.0 * x[1];
  return (a + a) * x[0];
}

// (1 - x)^2 + 100 (y - x^2)
double nehmeier3_dx0(const double*, const double*) { return 100.0; }

double nehmeier3_dx1(const double* x, const double*) {
  const double a = 1.0 - x[1];
  return -a + -a + 100.0 * -(x[1] + x[1]);
}

}  // namespace stagediff::hand
