#include "genalg/scale_ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "genalg/error.hpp"

namespace genalg {

EpsilonGrid::EpsilonGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 9) {
    throw InvalidArgument("epsilon grid needs at least 9 points (J >= 8)");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double e = values_[j];
    if (!(e > 0.0 && e <= 1.0)) {
      throw InvalidArgument("epsilon values must lie in ]0,1]");
    }
    if (j > 0 && !(e < values_[j - 1])) {
      throw InvalidArgument("epsilon values must be strictly decreasing");
    }
  }
}

EpsilonGrid EpsilonGrid::geometric(double eps0, double ratio, int last_index) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("geometric epsilon grid needs ratio in ]0,1[");
  }
  std::vector<double> v(static_cast<std::size_t>(last_index + 1));
  for (int j = 0; j <= last_index; ++j) {
    v[static_cast<std::size_t>(j)] = eps0 * std::pow(ratio, j);
  }
  return EpsilonGrid(std::move(v));
}

IndexRange tail_window(const EpsilonGrid& grid, std::size_t points) {
  const std::size_t n = grid.size();
  const std::size_t w = std::min(points, n);
  return {n - w, n};
}

RealNet::RealNet(EpsilonGrid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw InvalidArgument("net length does not match its epsilon grid");
  }
  if (!values_.allFinite()) {
    throw InvalidArgument("net values must be finite");
  }
}

RealNet RealNet::from_function(const EpsilonGrid& grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) v[static_cast<Eigen::Index>(j)] = f(grid[j]);
  return RealNet(grid, std::move(v));
}

RealNet RealNet::constant(const EpsilonGrid& grid, double c) {
  return RealNet(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), c));
}

namespace {

void require_same_grid(const RealNet& a, const RealNet& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("nets live on different epsilon grids");
}

}  // namespace

RealNet net_add(const RealNet& a, const RealNet& b) {
  require_same_grid(a, b);
  return RealNet(a.grid(), a.values() + b.values());
}

RealNet net_sub(const RealNet& a, const RealNet& b) {
  require_same_grid(a, b);
  return RealNet(a.grid(), a.values() - b.values());
}

RealNet net_mul(const RealNet& a, const RealNet& b) {
  require_same_grid(a, b);
  return RealNet(a.grid(), a.values().cwiseProduct(b.values()));
}

RealNet net_abs(const RealNet& a) { return RealNet(a.grid(), a.values().cwiseAbs()); }

RealNet net_scale(const RealNet& a, double c) { return RealNet(a.grid(), c * a.values()); }

std::string to_string(ScaleTag tag) {
  switch (tag) {
    case ScaleTag::Moderate: return "Moderate";
    case ScaleTag::NegligibleCandidate: return "NegligibleCandidate";
    case ScaleTag::EventuallyZero: return "EventuallyZero";
    case ScaleTag::NotModerate: return "NotModerate";
  }
  return "Unknown";
}

ScaleTag scale_tag_from_string(const std::string& s) {
  if (s == "Moderate") return ScaleTag::Moderate;
  if (s == "NegligibleCandidate") return ScaleTag::NegligibleCandidate;
  if (s == "EventuallyZero") return ScaleTag::EventuallyZero;
  if (s == "NotModerate") return ScaleTag::NotModerate;
  throw ParseError("unknown scale tag '" + s + "'");
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (std::abs(y[i]) >= kUnderflowFloor && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  }
  LogLogFit fit;
  fit.points = lx.size();
  if (lx.size() < 2) return fit;

  const auto n = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = lx[static_cast<std::size_t>(i)];
    design(i, 1) = 1.0;
    rhs[i] = ly[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  fit.slope = coef[0];
  fit.intercept = coef[1];
  fit.max_residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  return fit;
}

namespace {

// Log-log second differences are positive and non-decreasing along the
// window, and the local slope drifts by more than tol overall.
bool superpolynomial_curvature(const std::vector<double>& logeps,
                               const std::vector<double>& logabs, double tol) {
  const std::size_t n = logeps.size();
  if (n < 4) return false;
  // Local growth order: minus the local slope, so it increases when the
  // net outgrows every polynomial.
  std::vector<double> growth(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    growth[i] = -(logabs[i + 1] - logabs[i]) / (logeps[i + 1] - logeps[i]);
  }
  std::vector<double> d2(growth.size() - 1);
  for (std::size_t i = 0; i + 1 < growth.size(); ++i) d2[i] = growth[i + 1] - growth[i];
  for (std::size_t i = 0; i < d2.size(); ++i) {
    if (!(d2[i] > 0.0)) return false;
    if (i > 0 && d2[i] < d2[i - 1] * (1.0 - 1e-9)) return false;
  }
  return growth.back() - growth.front() > tol;
}

}  // namespace

ScaleClass classify_net(const RealNet& net, IndexRange window, int k_max, double tol) {
  if (!net.values().allFinite()) throw InvalidArgument("classify_net: non-finite net values");
  if (window.end > net.size() || window.size() < kMinFitPoints) {
    throw InvalidArgument("classify_net: fit window needs at least 5 grid points");
  }
  if (k_max < 1) throw InvalidArgument("classify_net: k_max must be >= 1");

  ScaleClass out;
  out.k_max = k_max;

  std::vector<double> absval(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double a = std::abs(net[window.begin + i]);
    absval[i] = a < kUnderflowFloor ? 0.0 : a;
  }

  if (absval.back() == 0.0) {
    out.tag = ScaleTag::EventuallyZero;
    return out;
  }

  std::vector<double> eps(window.size()), logeps, logabs;
  for (std::size_t i = 0; i < window.size(); ++i) {
    eps[i] = net.epsilon(window.begin + i);
    if (absval[i] > 0.0) {
      logeps.push_back(std::log(eps[i]));
      logabs.push_back(std::log(absval[i]));
    }
  }
  const LogLogFit fit = fit_loglog(eps, absval);
  out.exponent = fit.slope;
  out.fit_residual = fit.max_residual;

  if (superpolynomial_curvature(logeps, logabs, tol)) {
    out.tag = ScaleTag::NotModerate;
    out.exponent.reset();
    return out;
  }

  // Envelope |r_ε| <= C_k ε^k with C_k anchored on the first half of the
  // window: the scaled net may not grow past (1+tol) of that anchor.
  const std::size_t half = window.size() / 2;
  bool negligible = true;
  for (int k = 1; k <= k_max && negligible; ++k) {
    double anchor = 0.0, rest = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
      const double q = absval[i] * std::pow(eps[i], -k);
      if (i < half) {
        anchor = std::max(anchor, q);
      } else {
        rest = std::max(rest, q);
      }
    }
    negligible = rest <= (1.0 + tol) * anchor;
  }
  out.tag = negligible ? ScaleTag::NegligibleCandidate : ScaleTag::Moderate;
  return out;
}

ScaleClass classify_net(const RealNet& net, int k_max, double tol) {
  return classify_net(net, tail_window(net.grid()), k_max, tol);
}

bool gen_eq(const RealNet& a, const RealNet& b, int k_max, double tol) {
  require_same_grid(a, b);
  if (!classify_net(a, k_max, tol).in_ring() || !classify_net(b, k_max, tol).in_ring()) {
    throw PreconditionViolation("gen_eq: both nets must be moderate");
  }
  return classify_net(net_sub(a, b), k_max, tol).negligible();
}

ViscosityScale validate_viscosity(const RealNet& r, int k_max, double tol,
                                  std::optional<double> exponent_hint) {
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!(r[j] > 0.0 && r[j] <= 1.0)) {
      throw NotInVAPlus("range", "r_eps must lie in ]0,1] at eps = " + std::to_string(r.epsilon(j)));
    }
  }
  const IndexRange w = tail_window(r.grid());
  for (std::size_t j = w.begin + 1; j < w.end; ++j) {
    if (r[j] > r[j - 1]) throw NotInVAPlus("limit", "r_eps is not decreasing along the tail");
  }
  if (!(r[r.size() - 1] <= 0.5 * r[0])) {
    throw NotInVAPlus("limit", "r_eps does not tend to 0 along the grid");
  }
  Eigen::VectorXd inv = r.values().cwiseInverse();
  if (!inv.allFinite() ||
      !classify_net(RealNet(r.grid(), std::move(inv)), k_max, tol).in_ring()) {
    throw NotInVAPlus("reciprocal", "1/r_eps is not moderate");
  }
  return ViscosityScale{r, exponent_hint};
}

SolidityCheck check_solidity(const RealNet& s, const RealNet& t, int k_max, double tol) {
  require_same_grid(s, t);
  SolidityCheck out;
  out.precondition_met = true;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (std::abs(t[j]) > std::abs(s[j])) {
      out.precondition_met = false;
      return out;
    }
  }
  const ScaleClass cs = classify_net(s, k_max, tol);
  if (!cs.in_ring()) {
    out.implication_held = true;
    return out;
  }
  const ScaleClass ct = classify_net(t, k_max, tol);
  if (!ct.in_ring()) return out;
  if (cs.tag == ScaleTag::EventuallyZero) {
    out.implication_held = ct.tag == ScaleTag::EventuallyZero;
    return out;
  }
  // t must sit under s's fitted envelope C·ε^{slope}.
  const IndexRange w = tail_window(s.grid());
  const double slope = cs.exponent.value_or(0.0);
  double cs_env = 0.0, ct_env = 0.0;
  for (std::size_t j = w.begin; j < w.end; ++j) {
    const double scale = std::pow(s.epsilon(j), -slope);
    cs_env = std::max(cs_env, std::abs(s[j]) * scale);
    ct_env = std::max(ct_env, std::abs(t[j]) * scale);
  }
  out.implication_held = ct_env <= (1.0 + tol) * cs_env;
  return out;
}

void PolynomialBound::validate(int k_max, double tol) const {
  if (static_cast<int>(coeff_nets.size()) != degree + 1) {
    throw InvalidArgument("polynomial bound needs degree+1 coefficient nets");
  }
  for (std::size_t k = 0; k < coeff_nets.size(); ++k) {
    const RealNet& c = coeff_nets[k];
    if (c.values().minCoeff() < 0.0) {
      throw InvalidArgument("polynomial bound coefficient " + std::to_string(k) + " is negative");
    }
    if (!classify_net(c, k_max, tol).in_ring()) {
      throw InvalidArgument("polynomial bound coefficient " + std::to_string(k) +
                            " is not moderate");
    }
    if (k > 0 && !(c.grid() == coeff_nets[0].grid())) {
      throw GridMismatch("polynomial bound coefficients on different grids");
    }
  }
  if (zero_constant && coeff_nets[0].values().cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidArgument("polynomial bound requires a zero constant term");
  }
}

double PolynomialBound::evaluate(std::size_t j, double x) const {
  double acc = 0.0;
  for (int k = degree; k >= 0; --k) acc = acc * x + coeff_nets[static_cast<std::size_t>(k)][j];
  return acc;
}

PolynomialBound PolynomialBound::linear(const RealNet& slope, bool zero_constant) {
  PolynomialBound p;
  p.degree = 1;
  p.coeff_nets = {RealNet::constant(slope.grid(), 0.0), slope};
  p.zero_constant = zero_constant;
  return p;
}

CertificateResult check_extension_certificate(const RealNet& in, const RealNet& out,
                                              const PolynomialBound& psi) {
  require_same_grid(in, out);
  for (const auto& c : psi.coeff_nets) require_same_grid(in, c);
  CertificateResult res;
  for (std::size_t j = 0; j < in.size(); ++j) {
    const double bound = psi.evaluate(j, in[j]);
    // One ulp-scale slack so that out == Ψ(in) computed two ways passes.
    if (out[j] > bound + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(bound)) {
      res.holds = false;
      res.first_violation = j;
      return res;
    }
  }
  return res;
}

}  // namespace genalg
