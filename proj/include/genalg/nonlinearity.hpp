#pragma once

#include <functional>
#include <string>
#include <vector>

namespace genalg {

using ScalarMap = std::function<double(double)>;

/// An increasing differentiable Φ with bounded, continuous Φ′ that may vanish
/// on a finite set.
struct PhiSpec {
  std::string name;
  ScalarMap phi;
  ScalarMap dphi;
  double dphi_sup = 0.0;  // ‖Φ′‖_{L∞(ℝ)}
  std::vector<double> declared_zero_set;
};

namespace phi_library {

/// Φ(s) = slope·s.
PhiSpec identity(double slope = 1.0);
/// Φ(s) = s³ on [−a, a], continued affinely with slope 3a² outside. Φ′(0) = 0.
PhiSpec saturated_cubic(double saturation = 1.0);
/// Φ(s) = arctan(s/scale)·scale; Φ′ > 0 everywhere, → 0 at ±∞.
PhiSpec arctan(double scale = 1.0);

/// Looks up a built-in by name ("identity", "saturated_cubic", "arctan") with
/// its single shape parameter.
PhiSpec by_name(const std::string& name, double parameter = 1.0);

}  // namespace phi_library

struct PhiValidation {
  bool increasing = true;
  bool derivative_bounded = true;
  bool derivative_matches = true;  // Φ′ agrees with central differences of Φ
  bool continuous = true;
  bool zeros_declared = true;

  bool ok() const noexcept {
    return increasing && derivative_bounded && derivative_matches && continuous && zeros_declared;
  }
};

/// Samples Φ on `samples` points of [−radius, radius] and checks the standing
/// assumptions on Φ.
PhiValidation validate_phi(const PhiSpec& phi, double radius = 10.0, int samples = 10000);

/// Φ_ε = Φ + r·Id. Throws InvalidArgument for r <= 0.
PhiSpec make_phi_eps(const PhiSpec& base, double r);

/// Φ frozen outside [m, M] plus the viscosity r·Id:
///   Φ(m) + r x   for x <= m
///   Φ(x) + r x   for m < x < M
///   Φ(M) + r x   for x >= M
/// The derivative takes the interior one-sided value at x = m and x = M, so
/// on [m, M] it coincides with Φ′ + r.
class TruncatedPhi {
 public:
  TruncatedPhi(PhiSpec base, double m, double M, double r);

  double operator()(double x) const;
  double derivative(double x) const;

  const PhiSpec& base() const noexcept { return base_; }
  double lower() const noexcept { return m_; }
  double upper() const noexcept { return M_; }
  double viscosity() const noexcept { return r_; }
  /// Global Lipschitz constant ‖Φ′‖_∞ + r.
  double lipschitz() const noexcept { return base_.dphi_sup + r_; }

 private:
  PhiSpec base_;
  double m_, M_, r_;
  double phi_m_, phi_M_;
};

TruncatedPhi truncate(const PhiSpec& base, double m, double M, double r);

}  // namespace genalg
