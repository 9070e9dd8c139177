#include "genalg/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "genalg/error.hpp"

namespace genalg {

namespace phi_library {

PhiSpec identity(double slope) {
  if (!(slope > 0.0)) throw InvalidArgument("identity slope must be positive");
  return {"identity", [slope](double s) { return slope * s; }, [slope](double) { return slope; },
          slope, {}};
}

PhiSpec saturated_cubic(double a) {
  if (!(a > 0.0)) throw InvalidArgument("saturation level must be positive");
  const double a3 = a * a * a;
  const double slope = 3.0 * a * a;
  auto phi = [a, a3, slope](double s) {
    if (s > a) return a3 + slope * (s - a);
    if (s < -a) return -a3 + slope * (s + a);
    return s * s * s;
  };
  auto dphi = [a, slope](double s) { return std::abs(s) >= a ? slope : 3.0 * s * s; };
  return {"saturated_cubic", phi, dphi, slope, {0.0}};
}

PhiSpec arctan(double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("arctan scale must be positive");
  return {"arctan", [scale](double s) { return scale * std::atan(s / scale); },
          [scale](double s) {
            const double t = s / scale;
            return 1.0 / (1.0 + t * t);
          },
          1.0, {}};
}

PhiSpec by_name(const std::string& name, double parameter) {
  if (name == "identity") return identity(parameter);
  if (name == "saturated_cubic") return saturated_cubic(parameter);
  if (name == "arctan") return arctan(parameter);
  throw InvalidArgument("unknown nonlinearity '" + name + "'");
}

}  // namespace phi_library

PhiValidation validate_phi(const PhiSpec& phi, double radius, int samples) {
  PhiValidation v;
  const double step = 2.0 * radius / (samples - 1);
  const double fd = 1e-5;
  const double jump_limit = 0.1 * std::max(phi.dphi_sup, 1.0);
  auto declared = [&](double s) {
    return std::any_of(phi.declared_zero_set.begin(), phi.declared_zero_set.end(),
                       [&](double z) { return std::abs(z - s) <= 2.0 * step; });
  };
  std::vector<double> ds(samples);
  double prev_phi = phi.phi(-radius);
  for (int i = 0; i < samples; ++i) {
    const double s = -radius + i * step;
    const double p = phi.phi(s);
    const double d = ds[i] = phi.dphi(s);
    if (i > 0 && !(p > prev_phi)) v.increasing = false;
    if (d < 0.0 || d > phi.dphi_sup * (1.0 + 1e-12)) v.derivative_bounded = false;
    if (i > 0 && std::abs(d - ds[i - 1]) > jump_limit) v.continuous = false;
    const double central = (phi.phi(s + fd) - phi.phi(s - fd)) / (2.0 * fd);
    if (std::abs(central - d) > 1e-4 * std::max(1.0, phi.dphi_sup)) v.derivative_matches = false;
    if (d < 1e-12 && !declared(s)) v.zeros_declared = false;
    prev_phi = p;
  }
  // Zeros between samples: refine every small local minimum of Φ′.
  const double small = 1e-3 * std::max(1.0, phi.dphi_sup);
  for (int i = 1; i + 1 < samples; ++i) {
    if (!(ds[i] <= ds[i - 1] && ds[i] <= ds[i + 1] && ds[i] < small)) continue;
    double lo = -radius + (i - 1) * step, hi = lo + 2.0 * step;
    for (int it = 0; it < 100; ++it) {
      const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
      if (phi.dphi(a) < phi.dphi(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    const double s = 0.5 * (lo + hi);
    if (phi.dphi(s) < 1e-12 && !declared(s)) v.zeros_declared = false;
  }
  return v;
}

PhiSpec make_phi_eps(const PhiSpec& base, double r) {
  if (!(r > 0.0)) throw InvalidArgument("viscosity r must be positive");
  PhiSpec out;
  out.name = base.name + "+r*Id";
  out.phi = [f = base.phi, r](double s) { return f(s) + r * s; };
  out.dphi = [df = base.dphi, r](double s) { return df(s) + r; };
  out.dphi_sup = base.dphi_sup + r;
  return out;
}

TruncatedPhi::TruncatedPhi(PhiSpec base, double m, double M, double r)
    : base_(std::move(base)), m_(m), M_(M), r_(r) {
  if (m > M) throw InvalidArgument("truncation needs m <= M");
  if (!(r > 0.0)) throw InvalidArgument("viscosity r must be positive");
  phi_m_ = base_.phi(m_);
  phi_M_ = base_.phi(M_);
}

double TruncatedPhi::operator()(double x) const {
  if (x <= m_) return phi_m_ + r_ * x;
  if (x >= M_) return phi_M_ + r_ * x;
  return base_.phi(x) + r_ * x;
}

double TruncatedPhi::derivative(double x) const {
  if (x < m_ || x > M_) return r_;
  return base_.dphi(x) + r_;
}

TruncatedPhi truncate(const PhiSpec& base, double m, double M, double r) {
  return TruncatedPhi(base, m, M, r);
}

}  // namespace genalg
