#pragma once

// Viscosity-regularized solver for −ΔΦ(u) + u = f, u = g on ∂Ω.
//
// For each viscosity r the regularized problem −ΔΦ_r(u) + u = f with
// Φ_r = Φ + r·Id is solved as u = w₀ + h, where w₀ is the discrete harmonic
// lift of g and h ∈ H¹₀ is a fixed point of the map Π: h ↦ w_h,
//
//   (Φ̃′(w₀+h)∇w_h, ∇v) + (w_h, v) = (f − w₀, v) − (Φ̃′(w₀+h)∇w₀, ∇v),
//
// with Φ̃ the truncation of Φ_r outside the data bounds [m, M]. Space is
// discretized with the flux-form 3-point (1D) / 5-point (2D) stencil; edge
// coefficients are arithmetic means of nodal values, which keeps every
// linear system a symmetric M-matrix.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "genalg/grid_domain.hpp"
#include "genalg/nonlinearity.hpp"
#include "genalg/scale_ring.hpp"

namespace genalg {

/// −div(a∇u) at interior nodes (zero at boundary nodes); u's boundary values
/// enter the stencil.
Eigen::VectorXd apply_diffusion(const Domain& d, const Eigen::VectorXd& a, const Eigen::VectorXd& u);

/// −div(a∇w) + reaction·w = rhs in Ω, w = dirichlet on ∂Ω.
struct LinearEllipticProblem {
  Domain domain;
  GridFunction coefficient;
  GridFunction rhs;
  BoundaryData dirichlet;
  double reaction = 1.0;
};

struct LinearSolution {
  GridFunction w;
  long iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients with diagonal scaling. Throws LinearSolverFailure if
/// the relative residual does not reach tol within max_iter iterations.
LinearSolution linear_solve(const LinearEllipticProblem& p, double tol = 1e-10,
                            long max_iter = 0, const GridFunction* guess = nullptr);

/// Discrete harmonic function with boundary values g.
GridFunction harmonic_lift(const BoundaryData& g, const Domain& d, double tol = 1e-10);

struct SolveOptions {
  double linear_tol = 1e-10;
  double picard_tol = 1e-8;        // on ‖Π(h) − h‖_{H¹₀}
  double max_principle_tol = 1e-7;
  /// h ← h + λ(Π(h) − h). λ is halved only when the residual exceeds 100×
  /// the best one seen so far; transient increases are tolerated.
  double damping = 0.5;
  double min_damping = 1.0 / 1024.0;
  int max_picard_iter = 500;
  long linear_max_iter = 0;        // 0: 10·(unknowns) + 100
  /// Starting correction h₀ (boundary values are ignored); zero if unset.
  std::optional<GridFunction> initial_correction;
};

/// Π(h) for the truncated nonlinearity. h must vanish on the boundary.
GridFunction picard_map(const GridFunction& h, const GridFunction& w0, const GridFunction& f,
                        const TruncatedPhi& phi_trunc, const SolveOptions& opts = {},
                        long* linear_iterations = nullptr);

struct SolveReport {
  double epsilon = 0.0;
  double r_eps = 0.0;
  double m = 0.0;
  double M = 0.0;
  int picard_iters = 0;
  std::vector<double> picard_residuals;
  std::vector<long> linear_solver_iters;
  double final_damping = 0.0;
  double u_linf = 0.0;
  double u_h1 = 0.0;
  double max_principle_margin = 0.0;
  /// r·‖u‖_{H¹} / (‖f‖_∞ + (2 + ‖Φ′‖_∞)‖g‖_∞); zero for zero data.
  double estimate_ratio = 0.0;
  /// max |−div(Φ_r′(u)∇u) + u − f| over interior nodes.
  double nonlinear_residual = 0.0;
};

struct RegularizedSolution {
  GridFunction u;
  SolveReport report;
};

/// Solves the regularized problem for a single viscosity r.
/// Throws PicardStalled when the iteration cap is hit and
/// MaxPrincipleViolation when u leaves [m − tol, M + tol].
RegularizedSolution solve_regularized(const GridFunction& f, const BoundaryData& g,
                                      const PhiSpec& base, double r, const SolveOptions& opts = {});

/// Data combination of the H¹ estimate: ‖f‖_∞ + (2 + ‖Φ′‖_∞)‖g‖_∞.
double estimate_data_norm(const GridFunction& f, const BoundaryData& g, double dphi_sup);

struct EstimateCheck {
  bool holds = true;
  double ratio = 0.0;  // ‖u‖_{H¹} / ((C_cal/r)·data)
};

EstimateCheck check_h1_estimate(const SolveReport& report, const GridFunction& f,
                                const BoundaryData& g, double dphi_sup, double c_cal);

/// r‖θ(f+δ, g+η) − θ(f, g)‖_E / (‖δ‖_∞ + ‖η‖_∞).
double perturbation_ratio(const GridFunction& f, const BoundaryData& g, const GridFunction& delta,
                          const BoundaryData& eta, const PhiSpec& base, double r,
                          const SolveOptions& opts = {});

struct CalibrationOptions {
  int instances = 20;
  double r_min = 0.05;
  double r_max = 1.0;
  double safety = 1.5;
  unsigned long long seed = 12345;
};

/// Once-per-(domain, Φ) calibration of the estimate constant: safety × the
/// largest of r‖u‖_{H¹}/(‖f‖+(2+‖Φ′‖)‖g‖) and r‖u‖_E/(‖f‖+‖g‖) over random
/// bounded data at moderate r. Even instances use nodal noise, odd ones
/// smooth single-mode fields.
double calibrate_estimate_constant(const Domain& d, const PhiSpec& base,
                                   const CalibrationOptions& cal = {},
                                   const SolveOptions& opts = {});

struct GeneralizedSolveOptions {
  SolveOptions solve;
  int workers = 1;
  int k_max = kDefaultKMax;
  double class_tol = kDefaultClassTol;
};

struct GeneralizedSolution {
  GeneralizedGridFunction u;      // norm_tag H1Linf, resolved flags copied from F
  std::vector<SolveReport> reports;
  RealNet e_norm_net;             // ‖u_ε‖_{L∞} + ‖u_ε‖_{H¹}
  ScaleClass e_norm_class;
  bool trace_exact = false;       // u_ε|∂Ω == g_ε bit for bit
};

/// Member-wise regularized solves with r_ε. Throws MemberSolveFailure naming
/// the offending ε, or Error if the solution norm net is not moderate.
GeneralizedSolution generalized_solve(const GeneralizedGridFunction& f,
                                      const std::vector<BoundaryData>& g, const PhiSpec& base,
                                      const ViscosityScale& r,
                                      const GeneralizedSolveOptions& opts = {});

struct WeakResidualEntry {
  std::string test_id;
  std::vector<double> residual;  // ρ_ε(φ) = −r_ε ∫ u_ε Δφ
  std::vector<double> bound;     // r_ε·max(‖g_ε‖, ‖f_ε‖)·|Ω|^{1/2}·‖Δφ‖_{L²}
  bool bound_ok = false;
  bool tends_to_zero = false;
  double slope = 0.0;            // log-log slope of |ρ| over resolved members
};

struct WeakSolutionReport {
  std::vector<double> hyp_net;   // r_ε·max(‖g_ε‖_∞, ‖f_ε‖_∞)
  bool hyp_holds = false;
  double hyp_slope = 0.0;
  std::vector<WeakResidualEntry> entries;
  /// max over ε of | ΔΦ(u) − (u − rΔu − f) | − solve residual, discretely.
  double decomposition_defect = 0.0;
  bool decomposition_ok = false;
  bool passed = false;
};

/// Checks that the generalized solution is a weak (H⁻²-associated) solution
/// of the unregularized problem. Throws NotWeaklySolvable if the hypothesis
/// net does not tend to 0.
WeakSolutionReport weak_solution_check(const GeneralizedSolution& u, const GeneralizedGridFunction& f,
                                       const std::vector<BoundaryData>& g, const PhiSpec& base,
                                       const ViscosityScale& r,
                                       const std::vector<TestFunctionH20>& tests, double tol);

/// Non-positive data gives a non-positive solution: returns gen_leq(U, 0)
/// together with u_ε <= max(sup f_ε, sup g_ε, 0) + solver_tol on every
/// member. Throws PreconditionViolation when F or G is not <= 0.
bool check_nonpositive(const GeneralizedGridFunction& u, const GeneralizedGridFunction& f,
                       const std::vector<BoundaryData>& g, int k_max = kDefaultKMax,
                       double tol = kDefaultClassTol, double solver_tol = 1e-7);

}  // namespace genalg
