#pragma once

// ε-indexed nets of reals sampled on a decreasing ε-grid, and their
// classification against the polynomial scale: moderate nets (bounded by
// C·ε^{-k}) form the ring, negligible nets (bounded by C_k·ε^k for every k)
// form the ideal, and generalized numbers are classes modulo the ideal.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace genalg {

inline constexpr int kDefaultKMax = 6;
inline constexpr double kDefaultClassTol = 0.15;
inline constexpr std::size_t kDefaultFitPoints = 10;
inline constexpr std::size_t kMinFitPoints = 5;
/// Magnitudes below this are treated as exact zeros.
inline constexpr double kUnderflowFloor = 1e-300;

/// Strictly decreasing sample of ]0,1].
class EpsilonGrid {
 public:
  EpsilonGrid() = default;
  explicit EpsilonGrid(std::vector<double> values);

  /// ε_j = eps0·ratio^j for j = 0..last_index.
  static EpsilonGrid geometric(double eps0 = 0.5, double ratio = 0.5, int last_index = 24);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const EpsilonGrid& other) const = default;

 private:
  std::vector<double> values_;
};

/// Half-open index range [begin, end) into an ε-grid.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

/// The last `points` indices of the grid (the small-ε end).
IndexRange tail_window(const EpsilonGrid& grid, std::size_t points = kDefaultFitPoints);

class RealNet {
 public:
  RealNet() = default;
  RealNet(EpsilonGrid grid, Eigen::VectorXd values);

  static RealNet from_function(const EpsilonGrid& grid, const std::function<double(double)>& f);
  static RealNet constant(const EpsilonGrid& grid, double c);

  const EpsilonGrid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }
  double epsilon(std::size_t j) const { return grid_[j]; }

 private:
  EpsilonGrid grid_;
  Eigen::VectorXd values_;
};

RealNet net_add(const RealNet& a, const RealNet& b);
RealNet net_sub(const RealNet& a, const RealNet& b);
RealNet net_mul(const RealNet& a, const RealNet& b);
RealNet net_abs(const RealNet& a);
RealNet net_scale(const RealNet& a, double c);

inline RealNet operator+(const RealNet& a, const RealNet& b) { return net_add(a, b); }
inline RealNet operator-(const RealNet& a, const RealNet& b) { return net_sub(a, b); }
inline RealNet operator*(const RealNet& a, const RealNet& b) { return net_mul(a, b); }
inline RealNet operator*(double c, const RealNet& a) { return net_scale(a, c); }

enum class ScaleTag { Moderate, NegligibleCandidate, EventuallyZero, NotModerate };

std::string to_string(ScaleTag tag);
ScaleTag scale_tag_from_string(const std::string& s);

struct ScaleClass {
  ScaleTag tag = ScaleTag::Moderate;
  /// Fitted log-log slope; ε^k has exponent k.
  std::optional<double> exponent;
  /// Largest absolute log-space deviation from the fitted line.
  double fit_residual = 0.0;
  int k_max = kDefaultKMax;

  /// Member of the ring (anything but NotModerate).
  bool in_ring() const noexcept { return tag != ScaleTag::NotModerate; }
  /// Member of the ideal, as far as the checked orders can tell.
  bool negligible() const noexcept {
    return tag == ScaleTag::NegligibleCandidate || tag == ScaleTag::EventuallyZero;
  }
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log x, log |y|), skipping zero y.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Decision procedure:
///  - zero tail inside the window          -> EventuallyZero
///  - log-log curvature positive, growing  -> NotModerate
///  - |r|·ε^{-k} non-increasing (within 1+tol) across the window for every
///    k = 1..k_max                          -> NegligibleCandidate
///  - otherwise                             -> Moderate
ScaleClass classify_net(const RealNet& net, IndexRange fit_window, int k_max = kDefaultKMax,
                        double tol = kDefaultClassTol);
ScaleClass classify_net(const RealNet& net, int k_max = kDefaultKMax,
                        double tol = kDefaultClassTol);

/// Equality of generalized numbers: the difference is negligible.
bool gen_eq(const RealNet& a, const RealNet& b, int k_max = kDefaultKMax,
            double tol = kDefaultClassTol);

struct ViscosityScale {
  RealNet net;
  std::optional<double> exponent_hint;

  double operator[](std::size_t j) const { return net[j]; }
  const EpsilonGrid& grid() const noexcept { return net.grid(); }
};

/// Accepts r when r_ε ∈ ]0,1], r decreases to 0 along the tail and 1/r is
/// moderate. Throws NotInVAPlus naming the failed clause.
ViscosityScale validate_viscosity(const RealNet& r, int k_max = kDefaultKMax,
                                  double tol = kDefaultClassTol,
                                  std::optional<double> exponent_hint = std::nullopt);

struct SolidityCheck {
  bool precondition_met = false;  // |t| <= |s| on every grid point
  bool implication_held = false;  // s moderate => t moderate at s's order
};

SolidityCheck check_solidity(const RealNet& s, const RealNet& t, int k_max = kDefaultKMax,
                             double tol = kDefaultClassTol);

/// Ψ_ε(x) = Σ_k c_{k,ε} x^k with coefficient nets in A₊.
struct PolynomialBound {
  int degree = 0;
  std::vector<RealNet> coeff_nets;
  bool zero_constant = false;

  /// Throws InvalidArgument if a coefficient net is negative, not moderate,
  /// or the constant term is nonzero while zero_constant is set.
  void validate(int k_max = kDefaultKMax, double tol = kDefaultClassTol) const;
  double evaluate(std::size_t j, double x) const;

  static PolynomialBound linear(const RealNet& slope, bool zero_constant = true);
};

struct CertificateResult {
  bool holds = true;
  std::optional<std::size_t> first_violation;
  explicit operator bool() const noexcept { return holds; }
};

/// Pointwise in ε: out_ε <= Ψ_ε(in_ε).
CertificateResult check_extension_certificate(const RealNet& in, const RealNet& out,
                                              const PolynomialBound& psi);

}  // namespace genalg
