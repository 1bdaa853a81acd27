#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include "bswave/errors.hpp"
#include "bswave/fe_space.hpp"
#include "bswave/geometry.hpp"

namespace bswave {

/// Physical and dispersion parameters of the wave system. The family is
/// parametrized by theta^2 in [2/3, 1]; the limit theta^2 = 2/3 has c = 0
/// (the regularized shallow-water case).
struct ModelParams {
  double g = 9.81;
  double theta_sq = 1.0;
  double b = 1.0 / 3.0;
  double c = 1.0 / 3.0;
};

inline ModelParams params_from_theta(double theta_sq, double g) {
  if (!(g > 0.0)) throw ModelError("gravity must be positive");
  if (!(theta_sq >= 2.0 / 3.0 && theta_sq <= 1.0))
    throw ModelError("theta^2 = " + std::to_string(theta_sq) +
                     " outside the valid range [2/3, 1]");
  ModelParams p;
  p.g = g;
  p.theta_sq = theta_sq;
  p.b = (3.0 * theta_sq - 1.0) / 6.0;
  p.c = (3.0 * theta_sq - 2.0) / 3.0;
  return p;
}

/// The four dispersion coefficients of the general two-parameter family,
/// kept with their provenance (mu, nu, theta^2).
struct AbcdCoefficients {
  double a, b, c, d;
  double mu, nu, theta_sq;
};

inline AbcdCoefficients abcd_from_mu_nu(double theta_sq, double mu,
                                        double nu) {
  AbcdCoefficients k;
  k.mu = mu;
  k.nu = nu;
  k.theta_sq = theta_sq;
  k.a = 0.5 * (1.0 / 3.0 - theta_sq) * mu;
  k.b = 0.5 * (theta_sq - 1.0 / 3.0) * (1.0 - mu);
  k.c = 0.5 * (theta_sq - 1.0) * nu;
  k.d = 0.5 * (1.0 - theta_sq) * (1.0 - nu);
  return k;
}

/// nu giving the energy-conserving subfamily (a = 0, b = d). Singular at
/// theta^2 = 1; use params_from_theta for that line.
inline double nu_for_conservative_family(double theta_sq) {
  if (theta_sq == 1.0)
    throw ModelError(
        "nu map is singular at theta^2 = 1; use params_from_theta");
  return (4.0 - 6.0 * theta_sq) / (3.0 * (1.0 - theta_sq));
}

/// Linear phase speed over sqrt(g D0) of the model, as a function of D0*k.
inline double dispersion_bona_smith(const ModelParams& p, double D0,
                                    double k) {
  if (!(D0 > 0.0) || k < 0.0)
    throw ModelError("dispersion: need D0 > 0 and k >= 0");
  double z = D0 * k, z2 = z * z;
  double denom = 1.0 + p.b * z2;
  return std::sqrt((1.0 + p.c * z2) / (denom * denom));
}

/// Linear phase speed over sqrt(g D0) of the full water-wave problem.
inline double dispersion_euler(double D0, double k) {
  if (!(D0 > 0.0) || k < 0.0)
    throw ModelError("dispersion: need D0 > 0 and k >= 0");
  double z = D0 * k;
  if (z < 1e-8) return std::sqrt(1.0 - z * z / 6.0);  // removable limit at 0
  return std::sqrt(std::tanh(z) / z);
}

/// Parameters of the closed-form line solitary wave: elevation
/// A sech^2(lambda (alpha.x - c_s t + xi0)), velocity alpha * B * eta.
struct SolitaryWaveParams {
  double amplitude = 0.0;    // A (m)
  double decay = 0.0;        // lambda (1/m)
  double speed = 0.0;        // c_s (m/s)
  double velocity_factor = 0.0;  // B in u = alpha B eta
  Vec2 direction{1.0, 0.0};
  double xi0 = 0.0;          // phase shift (m)
};

/// Closed-form solitary wave with evaluators for eta, u and the potential
/// phi = (A B / lambda) tanh(lambda (alpha.x - c_s t + xi0)).
class SolitaryWave {
 public:
  SolitaryWaveParams params;
  double D0 = 1.0;
  double g = 1.0;

  double phase(Vec2 p, double t) const {
    return params.direction.dot(p) - params.speed * t + params.xi0;
  }

  double eta(Vec2 p, double t) const {
    double s = 1.0 / std::cosh(params.decay * phase(p, t));
    return params.amplitude * s * s;
  }

  Vec2 velocity(Vec2 p, double t) const {
    return params.direction * (params.velocity_factor * eta(p, t));
  }

  double potential(Vec2 p, double t) const {
    return params.amplitude * params.velocity_factor / params.decay *
           std::tanh(params.decay * phase(p, t));
  }

  Vec2 eta_gradient(Vec2 p, double t) const {
    double xi = phase(p, t);
    double sech = 1.0 / std::cosh(params.decay * xi);
    double d = -2.0 * params.amplitude * params.decay * sech * sech *
               std::tanh(params.decay * xi);
    return params.direction * d;
  }

  ScalarField eta_field(double t = 0.0) const {
    SolitaryWave w = *this;
    return ScalarField{[w, t](Vec2 p) { return w.eta(p, t); },
                       [w, t](Vec2 p) { return w.eta_gradient(p, t); }};
  }

  ScalarField potential_field(double t = 0.0) const {
    SolitaryWave w = *this;
    return ScalarField{[w, t](Vec2 p) { return w.potential(p, t); },
                       [w, t](Vec2 p) { return w.velocity(p, t); }};
  }

  VectorField velocity_field(double t = 0.0) const {
    SolitaryWave w = *this;
    return VectorField{[w, t](Vec2 p) { return w.velocity(p, t); }};
  }

  /// Mass of the wave in a straight channel of width W: 2 A W / lambda.
  double channel_mass(double width) const {
    return 2.0 * params.amplitude * width / params.decay;
  }
};

/// Closed-form solitary wave over flat depth D0, crest at alpha.x = crest_x0
/// at t = 0. Amplitude is positive only for theta^2 in (7/9, 1); outside
/// that window the closed form is rejected.
inline SolitaryWave analytic_solitary(double theta_sq, double D0, double g,
                                      Vec2 direction, double crest_x0 = 0.0) {
  if (!(theta_sq > 7.0 / 9.0 && theta_sq < 1.0))
    throw ModelError(
        "analytic solitary wave requires theta^2 in (7/9, 1); the amplitude "
        "formula changes sign at theta^2 = 7/9 (got " +
        std::to_string(theta_sq) + ")");
  if (!(D0 > 0.0) || !(g > 0.0))
    throw ModelError("analytic solitary wave: need D0 > 0 and g > 0");
  double norm = direction.norm();
  if (!(norm > 0.0)) throw ModelError("direction must be a nonzero vector");

  SolitaryWave w;
  w.D0 = D0;
  w.g = g;
  auto& sp = w.params;
  sp.direction = direction * (1.0 / norm);
  sp.amplitude = 4.5 * D0 * (theta_sq - 7.0 / 9.0) / (1.0 - theta_sq);
  sp.decay = 0.5 * std::sqrt(3.0 * (theta_sq - 7.0 / 9.0) /
                             (D0 * (theta_sq - 2.0 / 3.0) *
                              (theta_sq - 1.0 / 3.0)));
  sp.speed = 4.0 * std::sqrt(g * D0) * (theta_sq - 2.0 / 3.0) /
             std::sqrt(2.0 * (theta_sq - 1.0 / 3.0) * (1.0 - theta_sq));
  sp.velocity_factor =
      std::sqrt(2.0 * g / D0 * (1.0 - theta_sq) / (theta_sq - 1.0 / 3.0));
  sp.xi0 = -crest_x0;
  return w;
}

/// Emit `D0k, bona_smith_ratio, euler_ratio` rows for k in [0, kmax].
inline void write_dispersion_table(std::ostream& out, const ModelParams& p,
                                   double D0, double kmax, int samples = 200) {
  out << "D0k, bona_smith_ratio, euler_ratio\n";
  out.precision(17);
  for (int i = 0; i <= samples; ++i) {
    double k = kmax * i / samples;
    out << D0 * k << ", " << dispersion_bona_smith(p, D0, k) << ", "
        << dispersion_euler(D0, k) << "\n";
  }
}

}  // namespace bswave
