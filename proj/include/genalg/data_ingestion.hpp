#pragma once

// Data nets: mollified Dirac families, embedded classical data, expression-
// or file-defined data, and random bounded fields for property tests.

#include <array>
#include <random>
#include <string>

#include "genalg/grid_domain.hpp"
#include "genalg/scale_ring.hpp"

namespace genalg {

enum class MollifierProfile { Bump, Triangle, Cosine };

std::string to_string(MollifierProfile p);
MollifierProfile mollifier_profile_from_string(const std::string& s);

/// Nonnegative profile supported in [−1, 1], scaled to unit integral.
class Mollifier {
 public:
  explicit Mollifier(MollifierProfile profile = MollifierProfile::Bump);

  double operator()(double s) const { return raw(s) / normalization_; }
  double raw(double s) const;
  /// ∫ raw over [−1, 1], composite Simpson with kQuadratureIntervals.
  double normalization() const noexcept { return normalization_; }
  double peak() const { return (*this)(0.0); }
  MollifierProfile profile() const noexcept { return profile_; }

  static constexpr int kQuadratureIntervals = 100000;

 private:
  MollifierProfile profile_;
  double normalization_ = 1.0;
};

/// Discrete mass tolerance for a member to count as resolved.
inline constexpr double kDiracMassTol = 1e-6;

/// δ_ε(x) = ε^{−d}·φ((x − x0)/ε) (tensor product φ(·)φ(·) in 2D), sampled
/// nodally. A member is flagged resolved when its support lies in Ω,
/// ε >= 2h, and its trapezoidal mass is within kDiracMassTol of 1.
GeneralizedGridFunction dirac_net(const std::array<double, 2>& x0, const Mollifier& moll,
                                  const Domain& d, const EpsilonGrid& grid);

struct DiracViscosity {
  ViscosityScale scale;   // r_ε = ε^{d+q}
  RealNet hyp_evidence;   // r_ε·‖δ_ε‖_∞ = ε^q·φ(0)^d
  bool hyp_holds = false;
  double hyp_slope = 0.0;
};

/// Throws NotInVAPlus if ε^{d+q} is rejected.
DiracViscosity viscosity_for_dirac(int d, int q, const EpsilonGrid& grid,
                                   const Mollifier& moll = Mollifier(), double tol = 1e-3);

/// Nodal samples of an expression in x (and y), or the values of a grid CSV
/// when `spec` names an existing file.
GridFunction build_data(const std::string& spec, const Domain& d);
BoundaryData build_boundary(const std::string& spec, const Domain& d);

/// r_ε from an expression in eps.
RealNet build_viscosity_net(const std::string& expression, const EpsilonGrid& grid);

GeneralizedGridFunction constant_net(const GridFunction& u, const EpsilonGrid& grid);

/// Independent uniform values in [lo, hi] at every node.
GridFunction uniform_noise(const Domain& d, double lo, double hi, std::mt19937_64& rng);
BoundaryData uniform_boundary_noise(const Domain& d, double lo, double hi, std::mt19937_64& rng);

}  // namespace genalg
