// Generated by tools/derive_manufactured.py. Do not edit by hand.
#pragma once

#include <array>
#include <cmath>

namespace olmfsi::manufactured {

using std::cos;
using std::pow;
using std::sin;
using std::sqrt;
constexpr double M_PI_VALUE = 3.14159265358979323846;

inline std::array<double, 2> strip_fluid_velocity(double x, double y, double R, double Hs, double U0) {
  return {pow(R, 3)*U0*y*(2*Hs*x*(x - 1) - R + y)/pow(2*Hs*x*(x - 1) - R, 3),
          2*Hs*pow(R, 3)*U0*pow(y, 2)*(2*x - 1)*(2*Hs*x*(x - 1) - R + y)/pow(2*Hs*x*(x - 1) - R, 4)};
}

/// Row-major (du_x/dx, du_x/dy, du_y/dx, du_y/dy).
inline std::array<double, 4> strip_fluid_velocity_gradient(double x, double y, double R, double Hs, double U0) {
  return {2*Hs*pow(R, 3)*U0*y*(3*y*(1 - 2*x) - 2*(2*x - 1)*(2*Hs*x*(x - 1) - R))/pow(2*Hs*x*(x - 1) - R, 4),
          pow(R, 3)*U0*(2*Hs*x*(x - 1) - R + 2*y)/pow(2*Hs*x*(x - 1) - R, 3),
          -4*Hs*pow(R, 3)*U0*pow(y, 2)*(4*Hs*y*pow(2*x - 1, 2) + (3*Hs*pow(2*x - 1, 2) - y)*(2*Hs*x*(x - 1) - R) - pow(2*Hs*x*(x - 1) - R, 2))/pow(2*Hs*x*(x - 1) - R, 5),
          2*Hs*pow(R, 3)*U0*y*(3*y*(2*x - 1) + 2*(2*x - 1)*(2*Hs*x*(x - 1) - R))/pow(2*Hs*x*(x - 1) - R, 4)};
}

inline double strip_fluid_pressure(double x, double y) {
  return 1 - x;
}

inline std::array<double, 2> strip_fluid_force(double x, double y, double R, double Hs, double U0, double nu) {
  return {(-2*pow(R, 3)*U0*nu*(2*Hs*y*(12*Hs*y*pow(2*x - 1, 2) + 3*(2*Hs*pow(2*x - 1, 2) - y)*(2*Hs*x*(x - 1) - R) - 2*pow(2*Hs*x*(x - 1) - R, 2)) + pow(2*Hs*x*(x - 1) - R, 2)) - pow(2*Hs*x*(x - 1) - R, 5))/pow(2*Hs*x*(x - 1) - R, 5),
          -4*Hs*pow(R, 3)*U0*nu*(2*x - 1)*(2*Hs*pow(y, 2)*(20*Hs*y*pow(2*x - 1, 2) + 12*(Hs*pow(2*x - 1, 2) - y)*(2*Hs*x*(x - 1) - R) - 9*pow(2*Hs*x*(x - 1) - R, 2)) + pow(2*Hs*x*(x - 1) - R, 2)*(2*Hs*x*(x - 1) - R + 3*y))/pow(2*Hs*x*(x - 1) - R, 6)};
}

inline std::array<double, 2> strip_solid_displacement(double x, double y, double Hs) {
  return {0,
          2*Hs*x*(1 - x)};
}

inline std::array<double, 4> strip_solid_displacement_gradient(double x, double y, double Hs) {
  return {0,
          0,
          2*Hs*(1 - 2*x),
          0};
}

inline std::array<double, 2> strip_solid_force_stvk(double x, double y, double Hs, double mu, double lam) {
  return {8*pow(Hs, 2)*(-lam - 2*mu)*(2*x - 1),
          4*Hs*(6*pow(Hs, 2)*(lam + 2*mu)*pow(2*x - 1, 2) + mu)};
}

inline std::array<double, 2> strip_solid_force_linear(double x, double y, double Hs, double mu, double lam) {
  return {0,
          4*Hs*mu};
}

inline std::array<double, 2> strip_aux_traction_stvk_full(double x, double R, double Hs, double U0, double nu, double mu, double lam) {
  return {(2*Hs*mu*(2*x - 1)*pow(2*Hs*x*(x - 1) - R, 2) + 2*Hs*(2*x - 1)*(2*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2)) - pow(R, 3)*U0*nu)/pow(2*Hs*x*(x - 1) - R, 2),
          (8*pow(Hs, 3)*pow(R, 3)*U0*nu*pow(2*x - 1, 3) - 2*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + pow(2*Hs*x*(x - 1) - R, 2)*(-2*pow(Hs, 2)*lam*pow(2*x - 1, 2) - 4*pow(Hs, 2)*mu*pow(2*x - 1, 2) + x - 1))/pow(2*Hs*x*(x - 1) - R, 2)};
}

inline std::array<double, 2> strip_aux_traction_stvk_sym(double x, double R, double Hs, double U0, double nu, double mu, double lam) {
  return {(2*Hs*mu*(2*x - 1)*pow(2*Hs*x*(x - 1) - R, 2) + 2*Hs*(2*x - 1)*(4*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2)) + pow(R, 3)*U0*nu*(4*pow(Hs, 2)*pow(2*x - 1, 2) - 1))/pow(2*Hs*x*(x - 1) - R, 2),
          (-4*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + 2*Hs*pow(R, 3)*U0*nu*(2*x - 1)*(4*pow(Hs, 2)*pow(2*x - 1, 2) - 1) + pow(2*Hs*x*(x - 1) - R, 2)*(-2*pow(Hs, 2)*lam*pow(2*x - 1, 2) - 4*pow(Hs, 2)*mu*pow(2*x - 1, 2) + x - 1))/pow(2*Hs*x*(x - 1) - R, 2)};
}

inline std::array<double, 2> strip_aux_traction_linear_full(double x, double R, double Hs, double U0, double nu, double mu, double lam) {
  return {(2*Hs*mu*(2*x - 1)*pow(2*Hs*x*(x - 1) - R, 2) + 2*Hs*(2*x - 1)*(2*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2)) - pow(R, 3)*U0*nu)/pow(2*Hs*x*(x - 1) - R, 2),
          (8*pow(Hs, 3)*pow(R, 3)*U0*nu*pow(2*x - 1, 3) - 2*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2))/pow(2*Hs*x*(x - 1) - R, 2)};
}

inline std::array<double, 2> strip_aux_traction_linear_sym(double x, double R, double Hs, double U0, double nu, double mu, double lam) {
  return {(2*Hs*mu*(2*x - 1)*pow(2*Hs*x*(x - 1) - R, 2) + 2*Hs*(2*x - 1)*(4*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2)) + pow(R, 3)*U0*nu*(4*pow(Hs, 2)*pow(2*x - 1, 2) - 1))/pow(2*Hs*x*(x - 1) - R, 2),
          (-4*Hs*pow(R, 3)*U0*nu*(1 - 2*x) + 2*Hs*pow(R, 3)*U0*nu*(2*x - 1)*(4*pow(Hs, 2)*pow(2*x - 1, 2) - 1) + (x - 1)*pow(2*Hs*x*(x - 1) - R, 2))/pow(2*Hs*x*(x - 1) - R, 2)};
}

inline std::array<double, 2> trig_velocity(double x, double y) {
  return {2*M_PI_VALUE*pow(sin(M_PI_VALUE*x), 2)*sin(M_PI_VALUE*y)*cos(M_PI_VALUE*y),
          -2*M_PI_VALUE*sin(M_PI_VALUE*x)*pow(sin(M_PI_VALUE*y), 2)*cos(M_PI_VALUE*x)};
}

inline std::array<double, 4> trig_velocity_gradient(double x, double y) {
  return {(1.0/2.0)*pow(M_PI_VALUE, 2)*(cos(M_PI_VALUE*(2*x - 2*y)) - cos(M_PI_VALUE*(2*x + 2*y))),
          2*pow(M_PI_VALUE, 2)*pow(sin(M_PI_VALUE*x), 2)*cos(2*M_PI_VALUE*y),
          -2*pow(M_PI_VALUE, 2)*pow(sin(M_PI_VALUE*y), 2)*cos(2*M_PI_VALUE*x),
          -1.0/2.0*pow(M_PI_VALUE, 2)*(cos(M_PI_VALUE*(2*x - 2*y)) - cos(M_PI_VALUE*(2*x + 2*y)))};
}

inline double trig_pressure(double x, double y) {
  return cos(M_PI_VALUE*x)*cos(M_PI_VALUE*y);
}

inline std::array<double, 2> trig_force(double x, double y, double nu) {
  return {M_PI_VALUE*(4*pow(M_PI_VALUE, 2)*nu*(1 - 2*cos(2*M_PI_VALUE*x))*sin(M_PI_VALUE*y) - sin(M_PI_VALUE*x))*cos(M_PI_VALUE*y),
          M_PI_VALUE*(-4*pow(M_PI_VALUE, 2)*nu*(1 - 2*cos(2*M_PI_VALUE*y))*sin(M_PI_VALUE*x) - sin(M_PI_VALUE*y))*cos(M_PI_VALUE*x)};
}

}  // namespace olmfsi::manufactured
