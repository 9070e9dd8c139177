#include "genalg/dirichlet_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "genalg/error.hpp"
#include "genalg/parallel.hpp"

namespace genalg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct Neighbor {
  Eigen::Index node;
  double inv_h2;
};

// Calls visit(neighbor, 1/h²) for the 2d stencil neighbours of an interior node.
template <typename Visit>
void for_each_neighbor(const Domain& d, Eigen::Index node, Visit&& visit) {
  const auto [i, j] = d.ij(node);
  const double ix = 1.0 / (d.hx() * d.hx());
  visit(d.index(i - 1, j), ix);
  visit(d.index(i + 1, j), ix);
  if (d.dim() == 2) {
    const double iy = 1.0 / (d.hy() * d.hy());
    visit(d.index(i, j - 1), iy);
    visit(d.index(i, j + 1), iy);
  }
}

std::vector<Eigen::Index> unknown_positions(const Domain& d) {
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(d.node_count()), -1);
  const auto& interior = d.interior_nodes();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    pos[static_cast<std::size_t>(interior[k])] = static_cast<Eigen::Index>(k);
  }
  return pos;
}

constexpr double kDivergenceFactor = 100.0;

void require_positive(const Eigen::VectorXd& a) {
  if (!(a.minCoeff() > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
}

}  // namespace

Eigen::VectorXd apply_diffusion(const Domain& d, const Eigen::VectorXd& a, const Eigen::VectorXd& u) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d.node_count());
  for (Eigen::Index k : d.interior_nodes()) {
    double acc = 0.0;
    for_each_neighbor(d, k, [&](Eigen::Index nb, double inv_h2) {
      acc += 0.5 * (a[k] + a[nb]) * inv_h2 * (u[k] - u[nb]);
    });
    out[k] = acc;
  }
  return out;
}

LinearSolution linear_solve(const LinearEllipticProblem& p, double tol, long max_iter,
                            const GridFunction* guess) {
  const Domain& d = p.domain;
  const Eigen::VectorXd& a = p.coefficient.values;
  require_positive(a);
  if (p.reaction < 0.0) throw InvalidArgument("reaction coefficient must be non-negative");

  const auto pos = unknown_positions(d);
  const auto& interior = d.interior_nodes();
  const auto n = static_cast<Eigen::Index>(interior.size());

  // Full-node vector carrying the Dirichlet values.
  Eigen::VectorXd bnd = Eigen::VectorXd::Zero(d.node_count());
  const auto& bnodes = d.boundary_nodes();
  for (std::size_t k = 0; k < bnodes.size(); ++k) {
    bnd[bnodes[k]] = p.dirichlet.values[static_cast<Eigen::Index>(k)];
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (d.dim() == 1 ? 3 : 5));
  Eigen::VectorXd b(n);
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Index k = interior[static_cast<std::size_t>(row)];
    double diag = p.reaction;
    double rhs = p.rhs.values[k];
    for_each_neighbor(d, k, [&](Eigen::Index nb, double inv_h2) {
      const double c = 0.5 * (a[k] + a[nb]) * inv_h2;
      diag += c;
      const Eigen::Index col = pos[static_cast<std::size_t>(nb)];
      if (col >= 0) {
        trips.emplace_back(row, col, -c);
      } else {
        rhs += c * bnd[nb];
      }
    });
    trips.emplace_back(row, row, diag);
    b[row] = rhs;
  }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());

  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iter > 0 ? max_iter : 10 * n + 100);
  cg.compute(A);

  Eigen::VectorXd x;
  if (guess != nullptr) {
    Eigen::VectorXd x0(n);
    for (Eigen::Index row = 0; row < n; ++row) x0[row] = guess->values[interior[static_cast<std::size_t>(row)]];
    x = cg.solveWithGuess(b, x0);
  } else {
    x = cg.solve(b);
  }
  if (cg.info() != Eigen::Success || !x.allFinite()) {
    throw LinearSolverFailure("conjugate gradients did not converge (relative residual " +
                                  std::to_string(cg.error()) + ")",
                              cg.iterations());
  }

  Eigen::VectorXd w = bnd;
  for (Eigen::Index row = 0; row < n; ++row) w[interior[static_cast<std::size_t>(row)]] = x[row];
  return {GridFunction(d, std::move(w)), cg.iterations(), cg.error()};
}

GridFunction harmonic_lift(const BoundaryData& g, const Domain& d, double tol) {
  LinearEllipticProblem p{d, GridFunction::constant(d, 1.0), GridFunction::zero(d), g, 0.0};
  return linear_solve(p, tol).w;
}

GridFunction picard_map(const GridFunction& h, const GridFunction& w0, const GridFunction& f,
                        const TruncatedPhi& phi_trunc, const SolveOptions& opts,
                        long* linear_iterations) {
  const Domain& d = w0.domain;
  Eigen::VectorXd a(d.node_count());
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = phi_trunc.derivative(w0.values[k] + h.values[k]);

  const Eigen::VectorXd lift_flux = apply_diffusion(d, a, w0.values);
  Eigen::VectorXd rhs = f.values - w0.values - lift_flux;
  for (Eigen::Index k : d.boundary_nodes()) rhs[k] = 0.0;

  LinearEllipticProblem p{d, GridFunction(d, std::move(a)), GridFunction(d, std::move(rhs)),
                          BoundaryData::constant(d, 0.0), 1.0};
  LinearSolution sol = linear_solve(p, opts.linear_tol, opts.linear_max_iter, &h);
  if (linear_iterations != nullptr) *linear_iterations = sol.iterations;
  return std::move(sol.w);
}

double estimate_data_norm(const GridFunction& f, const BoundaryData& g, double dphi_sup) {
  return norm(f, NormKind::Linf) + (2.0 + dphi_sup) * g.linf();
}

RegularizedSolution solve_regularized(const GridFunction& f, const BoundaryData& g,
                                      const PhiSpec& base, double r, const SolveOptions& opts) {
  if (!(r > 0.0)) throw InvalidArgument("viscosity r must be positive");
  if (!(f.domain == g.domain)) throw GridMismatch("f and g live on different domains");
  const Domain& d = f.domain;

  SolveReport rep;
  rep.r_eps = r;
  rep.m = std::min(f.values.minCoeff(), g.values.size() ? g.values.minCoeff() : 0.0);
  rep.M = std::max(f.values.maxCoeff(), g.values.size() ? g.values.maxCoeff() : 0.0);
  if (g.values.size() == 0) rep.m = f.values.minCoeff(), rep.M = f.values.maxCoeff();

  const TruncatedPhi phi_t = truncate(base, rep.m, rep.M, r);
  const GridFunction w0 = harmonic_lift(g, d, opts.linear_tol);

  GridFunction h = GridFunction::zero(d);
  if (opts.initial_correction) {
    h = *opts.initial_correction;
    for (Eigen::Index k : d.boundary_nodes()) h.values[k] = 0.0;
  }

  double lambda = opts.damping;
  double best = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < opts.max_picard_iter; ++it) {
    long lin_iters = 0;
    GridFunction image = picard_map(h, w0, f, phi_t, opts, &lin_iters);
    rep.linear_solver_iters.push_back(lin_iters);
    const double res = norm(image - h, NormKind::H10);
    rep.picard_residuals.push_back(res);
    rep.picard_iters = it + 1;
    if (res <= opts.picard_tol) {
      h = std::move(image);
      converged = true;
      break;
    }
    // The undamped residual routinely rises for a few steps before settling,
    // so λ is only cut when the iteration looks divergent.
    if (res > kDivergenceFactor * best) lambda = std::max(0.5 * lambda, opts.min_damping);
    best = std::min(best, res);
    h.values = (1.0 - lambda) * h.values + lambda * image.values;
  }
  rep.final_damping = lambda;
  if (!converged) {
    const auto& rs = rep.picard_residuals;
    std::vector<double> tail(rs.end() - std::min<std::ptrdiff_t>(10, static_cast<std::ptrdiff_t>(rs.size())), rs.end());
    throw PicardStalled("fixed-point iteration did not reach tolerance after " +
                            std::to_string(rep.picard_iters) + " iterations (r = " +
                            std::to_string(r) + ")",
                        std::move(tail));
  }

  GridFunction u = w0 + h;
  rep.u_linf = norm(u, NormKind::Linf);
  rep.u_h1 = norm(u, NormKind::H1);
  rep.max_principle_margin =
      std::min((rep.M - u.values.array()).minCoeff(), (u.values.array() - rep.m).minCoeff());
  if (rep.max_principle_margin < -opts.max_principle_tol) {
    throw MaxPrincipleViolation("solution leaves the data bounds [m, M]", rep.max_principle_margin);
  }

  // Residual of the untruncated regularized equation.
  Eigen::VectorXd a(d.node_count());
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = base.dphi(u.values[k]) + r;
  Eigen::VectorXd res = apply_diffusion(d, a, u.values) + u.values - f.values;
  double worst = 0.0;
  for (Eigen::Index k : d.interior_nodes()) worst = std::max(worst, std::abs(res[k]));
  rep.nonlinear_residual = worst;

  const double data = estimate_data_norm(f, g, base.dphi_sup);
  rep.estimate_ratio = data > 0.0 ? r * rep.u_h1 / data : 0.0;
  return {std::move(u), std::move(rep)};
}

EstimateCheck check_h1_estimate(const SolveReport& report, const GridFunction& f,
                                const BoundaryData& g, double dphi_sup, double c_cal) {
  if (!(c_cal > 0.0)) throw InvalidArgument("calibration constant must be positive");
  EstimateCheck out;
  const double bound = (c_cal / report.r_eps) * estimate_data_norm(f, g, dphi_sup);
  if (bound == 0.0) {
    out.holds = report.u_h1 == 0.0;
    out.ratio = 0.0;
    return out;
  }
  out.ratio = report.u_h1 / bound;
  out.holds = out.ratio <= 1.0;
  return out;
}

double perturbation_ratio(const GridFunction& f, const BoundaryData& g, const GridFunction& delta,
                          const BoundaryData& eta, const PhiSpec& base, double r,
                          const SolveOptions& opts) {
  const double size = norm(delta, NormKind::Linf) + eta.linf();
  if (size == 0.0) return 0.0;
  const auto base_sol = solve_regularized(f, g, base, r, opts);
  BoundaryData g2(g.domain, g.values + eta.values);
  const auto pert_sol = solve_regularized(f + delta, g2, base, r, opts);
  return r * e_norm(pert_sol.u - base_sol.u) / size;
}

double calibrate_estimate_constant(const Domain& d, const PhiSpec& base,
                                   const CalibrationOptions& cal, const SolveOptions& opts) {
  std::mt19937_64 rng(cal.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < cal.instances; ++inst) {
    const double r = cal.r_min * std::pow(cal.r_max / cal.r_min, unit(rng));
    const double fa = 0.5 + 2.5 * unit(rng);
    const double ga = 0.5 + 1.5 * unit(rng);
    GridFunction f;
    BoundaryData g;
    if (inst % 2 == 0) {
      Eigen::VectorXd fv(d.node_count());
      for (Eigen::Index k = 0; k < fv.size(); ++k) fv[k] = fa * (2.0 * unit(rng) - 1.0);
      Eigen::VectorXd gv(static_cast<Eigen::Index>(d.boundary_nodes().size()));
      for (Eigen::Index k = 0; k < gv.size(); ++k) gv[k] = ga * (2.0 * unit(rng) - 1.0);
      f = GridFunction(d, std::move(fv));
      g = BoundaryData(d, std::move(gv));
    } else {
      // Smooth data: offset plus one low mode, |f| <= fa, |g| <= ga.
      const double c = 2.0 * unit(rng) - 1.0, cg = 2.0 * unit(rng) - 1.0;
      const double k = 1.0 + std::floor(3.0 * unit(rng)), phase = 2.0 * std::numbers::pi * unit(rng);
      const double lx = d.x_max() - d.x_min();
      f = GridFunction::sample(d, [&](double x, double) {
        return fa * (c + (1.0 - std::abs(c)) * std::sin(k * std::numbers::pi * (x - d.x_min()) / lx + phase));
      });
      g = BoundaryData::sample(d, [&](double x, double y) {
        return ga * (cg + (1.0 - std::abs(cg)) * std::cos(2.0 * (x + y) + phase));
      });
    }

    const auto sol = solve_regularized(f, g, base, r, opts);
    worst = std::max(worst, sol.report.estimate_ratio);
    const double sup_data = norm(f, NormKind::Linf) + g.linf();
    worst = std::max(worst, r * e_norm(sol.u) / sup_data);
  }
  return cal.safety * worst;
}

GeneralizedSolution generalized_solve(const GeneralizedGridFunction& f,
                                      const std::vector<BoundaryData>& g, const PhiSpec& base,
                                      const ViscosityScale& r, const GeneralizedSolveOptions& opts) {
  if (!(f.grid == r.grid())) throw GridMismatch("data and viscosity nets use different grids");
  if (g.size() != f.size()) throw GridMismatch("boundary net length differs from the data net");

  const std::size_t count = f.size();
  std::vector<GridFunction> members(count);
  std::vector<SolveReport> reports(count);
  parallel_for(count, opts.workers, [&](std::size_t j) {
    try {
      auto sol = solve_regularized(f.members[j], g[j], base, r[j], opts.solve);
      sol.report.epsilon = f.grid[j];
      members[j] = std::move(sol.u);
      reports[j] = std::move(sol.report);
    } catch (const Error& e) {
      throw MemberSolveFailure("member solve failed at eps = " + std::to_string(f.grid[j]) + ": " +
                                   e.what(),
                               f.grid[j]);
    }
  });

  GeneralizedSolution out;
  out.u = GeneralizedGridFunction(f.grid, std::move(members), NormTag::H1Linf);
  out.u.resolved = f.resolved;
  out.reports = std::move(reports);
  out.e_norm_net = out.u.ambient_norm_net();
  out.e_norm_class = classify_net(out.e_norm_net, opts.k_max, opts.class_tol);
  if (!out.e_norm_class.in_ring()) {
    throw Error("generalized solution norm net is not moderate");
  }
  out.trace_exact = true;
  for (std::size_t j = 0; j < count; ++j) {
    const BoundaryData tr = BoundaryData::trace(out.u.members[j]);
    if (tr.values.size() != g[j].values.size() || !(tr.values.array() == g[j].values.array()).all()) {
      out.trace_exact = false;
    }
  }
  return out;
}

WeakSolutionReport weak_solution_check(const GeneralizedSolution& sol, const GeneralizedGridFunction& f,
                                       const std::vector<BoundaryData>& g, const PhiSpec& base,
                                       const ViscosityScale& r,
                                       const std::vector<TestFunctionH20>& tests, double tol) {
  const GeneralizedGridFunction& u = sol.u;
  if (!(u.grid == f.grid) || !(u.grid == r.grid()) || g.size() != u.size()) {
    throw GridMismatch("weak_solution_check: solution, data and viscosity grids differ");
  }
  const std::size_t count = u.size();
  const Domain& d = u.domain();
  const std::vector<bool>& mask = u.resolved;

  auto resolved_eps = [&](const std::vector<double>& net) {
    std::vector<double> e, v;
    for (std::size_t j = 0; j < count; ++j) {
      if (mask.empty() || mask[j]) {
        e.push_back(u.grid[j]);
        v.push_back(net[j]);
      }
    }
    // Fit over the small-ε end, as in classification.
    const std::size_t keep = std::min<std::size_t>(kDefaultFitPoints, e.size());
    e.erase(e.begin(), e.end() - static_cast<std::ptrdiff_t>(keep));
    v.erase(v.begin(), v.end() - static_cast<std::ptrdiff_t>(keep));
    return fit_loglog(e, v).slope;
  };

  WeakSolutionReport rep;
  std::vector<double> data_max(count);
  for (std::size_t j = 0; j < count; ++j) {
    data_max[j] = std::max(g[j].linf(), norm(f.members[j], NormKind::Linf));
    rep.hyp_net.push_back(r[j] * data_max[j]);
  }
  // A property of the data alone, exact on every member.
  rep.hyp_holds = tail_tends_to_zero(rep.hyp_net, {}, tol);
  rep.hyp_slope = resolved_eps(rep.hyp_net);
  if (!rep.hyp_holds) {
    throw NotWeaklySolvable("r_eps * max(|g_eps|, |f_eps|) does not tend to 0", rep.hyp_net);
  }

  const double sqrt_measure = std::sqrt(d.measure());
  for (const auto& phi : tests) {
    const GridFunction lap = phi.laplacian_grid_function();
    const double lap_l2 = norm(lap, NormKind::L2);
    WeakResidualEntry e;
    e.test_id = phi.id;
    e.bound_ok = true;
    for (std::size_t j = 0; j < count; ++j) {
      const double rho = -r[j] * inner(u.members[j], lap);
      const double bound = r[j] * data_max[j] * sqrt_measure * lap_l2;
      e.residual.push_back(rho);
      e.bound.push_back(bound);
      if (std::abs(rho) > bound * (1.0 + 1e-9) + 1e-300) e.bound_ok = false;
    }
    e.tends_to_zero = tail_tends_to_zero(e.residual, mask, tol);
    e.slope = resolved_eps(e.residual);
    rep.entries.push_back(std::move(e));
  }

  // ΔΦ(u) = u − rΔu − f holds up to the solve residual, discretely:
  // −K_{Φ′}u − (u + r K_1 u − f) = −(K_{Φ′+r}u + u − f).
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.node_count());
  rep.decomposition_defect = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const Eigen::VectorXd& uv = u.members[j].values;
    Eigen::VectorXd dphi(uv.size());
    for (Eigen::Index k = 0; k < uv.size(); ++k) dphi[k] = base.dphi(uv[k]);
    const Eigen::VectorXd lap_phi = -apply_diffusion(d, dphi, uv);
    const Eigen::VectorXd lap_u = -apply_diffusion(d, ones, uv);
    double worst = 0.0, scale = 0.0;
    for (Eigen::Index k : d.interior_nodes()) {
      const double rhs = uv[k] - r[j] * lap_u[k] - f.members[j].values[k];
      worst = std::max(worst, std::abs(lap_phi[k] - rhs));
      scale = std::max({scale, std::abs(lap_phi[k]), std::abs(rhs)});
    }
    const double defect = std::abs(worst - sol.reports[j].nonlinear_residual) / (1.0 + scale);
    rep.decomposition_defect = std::max(rep.decomposition_defect, defect);
  }
  rep.decomposition_ok = rep.decomposition_defect <= 1e-9;

  rep.passed = rep.hyp_holds && rep.decomposition_ok;
  for (const auto& e : rep.entries) rep.passed = rep.passed && e.bound_ok && e.tends_to_zero;
  return rep;
}

bool check_nonpositive(const GeneralizedGridFunction& u, const GeneralizedGridFunction& f,
                       const std::vector<BoundaryData>& g, int k_max, double tol,
                       double solver_tol) {
  if (g.size() != f.size() || !(u.grid == f.grid)) {
    throw GridMismatch("check_nonpositive: nets of different lengths");
  }
  const GeneralizedGridFunction zero = embed_constant(GridFunction::zero(f.domain()), f.grid);
  if (!gen_leq(f, zero, k_max, tol)) {
    throw PreconditionViolation("check_nonpositive: F is not non-positive");
  }
  Eigen::VectorXd gpos(static_cast<Eigen::Index>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) {
    gpos[static_cast<Eigen::Index>(j)] = g[j].values.size() ? std::max(0.0, g[j].values.maxCoeff()) : 0.0;
  }
  if (!classify_net(RealNet(f.grid, gpos), k_max, tol).negligible()) {
    throw PreconditionViolation("check_nonpositive: G is not non-positive");
  }

  bool members_ok = true;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double upper = std::max({0.0, f.members[j].values.maxCoeff(), gpos[static_cast<Eigen::Index>(j)]});
    if (u.members[j].values.maxCoeff() > upper + solver_tol) members_ok = false;
  }
  const GeneralizedGridFunction uzero = embed_constant(GridFunction::zero(u.domain()), u.grid);
  return members_ok && gen_leq(u, uzero, k_max, tol);
}

}  // namespace genalg
