#pragma once

#include <cmath>

#include "bswave/fe_space.hpp"
#include "bswave/model.hpp"

namespace bswave {

/// Manufactured-solution benchmark on the unit square with the sloping depth
/// D(x,y) = 3/2 - (x+y)/20 and the exact pair
///   eta = exp(t) cos(2 pi x) cos(2 pi y),  phi = exp(t) cos(pi x) cos(pi y).
/// Both satisfy the homogeneous Neumann wall conditions on [0,1]^2, so the
/// forcing can enter the weak form as a plain load of the strong residual.
/// The closed-form residuals below were derived symbolically
/// (scripts/derive_mms_forcing.py) and are cross-checked against a
/// finite-difference oracle in the test suite.
struct MmsProblem {
  ModelParams params;

  static double depth_value(Vec2 p) { return 1.5 - (p.x + p.y) / 20.0; }

  ScalarField depth() const {
    return ScalarField{[](Vec2 p) { return depth_value(p); },
                       [](Vec2) { return Vec2{-0.05, -0.05}; }, 1.4, 1.5};
  }

  static double eta_exact(Vec2 p, double t) {
    return std::exp(t) * std::cos(2.0 * M_PI * p.x) * std::cos(2.0 * M_PI * p.y);
  }

  static Vec2 eta_grad_exact(Vec2 p, double t) {
    double e = std::exp(t);
    return {-2.0 * M_PI * e * std::sin(2.0 * M_PI * p.x) * std::cos(2.0 * M_PI * p.y),
            -2.0 * M_PI * e * std::cos(2.0 * M_PI * p.x) * std::sin(2.0 * M_PI * p.y)};
  }

  static double phi_exact(Vec2 p, double t) {
    return std::exp(t) * std::cos(M_PI * p.x) * std::cos(M_PI * p.y);
  }

  static Vec2 phi_grad_exact(Vec2 p, double t) {
    double e = std::exp(t);
    return {-M_PI * e * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
            -M_PI * e * std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
  }

  ScalarField eta_field(double t) const {
    return ScalarField{[t](Vec2 p) { return eta_exact(p, t); },
                       [t](Vec2 p) { return eta_grad_exact(p, t); }};
  }

  ScalarField phi_field(double t) const {
    return ScalarField{[t](Vec2 p) { return phi_exact(p, t); },
                       [t](Vec2 p) { return phi_grad_exact(p, t); }};
  }

  /// Strong residuals of the two equations at the exact pair.
  void forcing(Vec2 p, double t, double& f_eta, double& f_phi) const {
    const double x = p.x, y = p.y;
    const double g = params.g, b = params.b, c = params.c;
    // generated by scripts/derive_mms_forcing.py -- do not edit by hand
    const double x0 = std::exp(t);
    const double x1 = 5 * M_PI;
    const double x2 = M_PI * y;
    const double x3 = std::cos(x2);
    const double x4 = M_PI * x;
    const double x5 = std::sin(x4);
    const double x6 = x3 * x5;
    const double x7 = std::cos(x4);
    const double x8 = std::sin(x2);
    const double x9 = x7 * x8;
    const double x10 = 2 * x4;
    const double x11 = std::cos(x10);
    const double x12 = 2 * x2;
    const double x13 = std::cos(x12);
    const double x14 = x11 * x13;
    const double x15 = std::pow(M_PI, 2);
    const double x16 = x3 * x7;
    const double x17 = x15 * x16;
    const double x18 = 30 * M_PI * b;
    const double x19 = x13 * std::sin(x10);
    const double x20 = x11 * std::sin(x12);
    const double x21 = 10 * x17;
    const double x22 = b * x4;
    const double x23 = b * x2;
    const double x24 = x14 * x15;
    const double x25 = b * x24;
    const double x26 = 120 * x25;
    const double x27 = x * y;
    const double x28 = std::pow(x, 2);
    const double x29 = 2 * x25;
    const double x30 = std::pow(y, 2);
    const double x31 = x0 * x15;
    const double x32 = 200 * x31;
    const double x33 = 200 * x16;
    const double x34 = g * x14;
    const double x35 = b * x17;
    const double x36 = 60 * M_PI;
    const double x37 = c * g;
    const double x38 = x19 * x37;
    const double x39 = x20 * x37;
    const double x40 = 60 * x35;
    const double x41 = c * x15 * x34;
    const double x42 = 240 * x41;
    const double x43 = 100 * x31;
    const double x44 = 4 * x41;
    f_eta = (1.0 / 100.0) * x0 *
            (x * x21 - x * x26 - x0 * x24 * x33 + x1 * x6 + x1 * x9 +
             100 * x14 - 300 * x17 - x18 * x19 - x18 * x20 + x19 * x22 +
             x19 * x23 + x19 * x32 * x6 + x20 * x22 + x20 * x23 +
             x20 * x32 * x9 + x21 * y + 4 * x25 * x27 + 1800 * x25 - x26 * y +
             x28 * x29 + x29 * x30);
    f_phi = (1.0 / 200.0) * x0 *
            (-x * x40 - x * x42 + x10 * x38 + x10 * x39 + x12 * x38 +
             x12 * x39 - x18 * x6 - x18 * x9 + x22 * x6 + x22 * x9 + x23 * x6 +
             x23 * x9 + 2 * x27 * x35 + 8 * x27 * x41 + x28 * x35 + x28 * x44 +
             std::pow(x3, 2) * x43 * std::pow(x5, 2) + x30 * x35 + x30 * x44 +
             x33 + 200 * x34 + 900 * x35 - x36 * x38 - x36 * x39 - x40 * y +
             3600 * x41 - x42 * y + x43 * std::pow(x7, 2) * std::pow(x8, 2));
  }

  ScalarField forcing_eta(double t) const {
    MmsProblem m = *this;
    return ScalarField{[m, t](Vec2 p) {
      double fe, fp;
      m.forcing(p, t, fe, fp);
      return fe;
    }, {}};
  }

  ScalarField forcing_phi(double t) const {
    MmsProblem m = *this;
    return ScalarField{[m, t](Vec2 p) {
      double fe, fp;
      m.forcing(p, t, fe, fp);
      return fp;
    }, {}};
  }
};

}  // namespace bswave
