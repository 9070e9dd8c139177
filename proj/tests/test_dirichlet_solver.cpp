#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "genalg/data_ingestion.hpp"
#include "genalg/dirichlet_solver.hpp"
#include "genalg/error.hpp"

using namespace genalg;

namespace {

const double kPi = std::numbers::pi;

ViscosityScale eps_viscosity(const EpsilonGrid& g) {
  return validate_viscosity(RealNet::from_function(g, [](double e) { return e; }));
}

}  // namespace

TEST_CASE("HarmonicLift: AffineIn1D") {
  const auto d = Domain::interval(0.0, 1.0, 31);
  BoundaryData g(d, Eigen::Vector2d(0.0, 1.0));
  const auto w = harmonic_lift(g, d);
  for (Eigen::Index k = 0; k < w.values.size(); ++k) CHECK(std::abs(w.values[k] - d.coord(k)[0]) <= 1e-12);
}

TEST_CASE("HarmonicLift: ConstantAndPlanar") {
  const auto d1 = Domain::interval(0.0, 1.0, 20);
  const auto c = harmonic_lift(BoundaryData::constant(d1, 2.5), d1);
  CHECK(std::abs((c.values.array() - 2.5).abs().maxCoeff() - 0.0) <= 1e-12);

  const auto d = Domain::rectangle(0.0, 1.0, 0.0, 1.0, 24);
  const auto w = harmonic_lift(BoundaryData::sample(d, [](double x, double y) { return x + y; }), d);
  const auto residual = apply_diffusion(d, Eigen::VectorXd::Ones(d.node_count()), w.values);
  CHECK((residual.cwiseAbs().maxCoeff() * d.h() * d.h()) < 1e-10);
  for (Eigen::Index k = 0; k < w.values.size(); ++k) {
    const auto p = d.coord(k);
    CHECK(std::abs(w.values[k] - (p[0] + p[1])) <= 1e-10);
  }
}

TEST_CASE("LinearSolve: ManufacturedSecondOrder") {
  std::vector<double> errs;
  for (int n : {31, 63, 127}) {
    const auto d = Domain::interval(0.0, 1.0, n);
    LinearEllipticProblem p{d, GridFunction::constant(d, 1.0),
                            GridFunction::sample(d, [](double x, double) { return (kPi * kPi + 1.0) * std::sin(kPi * x); }),
                            BoundaryData::constant(d, 0.0)};
    const auto s = linear_solve(p);
    double e = 0.0;
    for (Eigen::Index k = 0; k < s.w.values.size(); ++k) {
      e = std::max(e, std::abs(s.w.values[k] - std::sin(kPi * d.coord(k)[0])));
    }
    errs.push_back(e);
  }
  CHECK(std::abs(std::log2(errs[0] / errs[1]) - 2.0) <= 0.1);
  CHECK(std::abs(std::log2(errs[1] / errs[2]) - 2.0) <= 0.1);
}

TEST_CASE("LinearSolve: ConstantIsReproduced") {
  std::mt19937_64 rng(2);
  const auto d = Domain::rectangle(0.0, 1.0, 0.0, 1.0, 12);
  LinearEllipticProblem p{d, uniform_noise(d, 0.1, 5.0, rng), GridFunction::constant(d, 3.0),
                          BoundaryData::constant(d, 3.0)};
  const auto s = linear_solve(p);
  CHECK(std::abs((s.w.values.array() - 3.0).abs().maxCoeff() - 0.0) <= 1e-9);
}

TEST_CASE("LinearSolve: MatchesDenseSolveWithTinyCoefficient") {
  std::mt19937_64 rng(4);
  const auto d = Domain::interval(0.0, 1.0, 48);
  const auto f = uniform_noise(d, -1.0, 2.0, rng);
  const BoundaryData g(d, Eigen::Vector2d(-0.5, 0.5));
  const auto a = GridFunction::constant(d, 1e-4);
  const auto s = linear_solve({d, a, f, g});

  // Dense oracle built directly from the stencil.
  const int n = 48;
  const double c = 1e-4 / (d.h() * d.h());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 1.0 + 2.0 * c;
    if (i > 0) A(i, i - 1) = -c;
    if (i < n - 1) A(i, i + 1) = -c;
    b[i] = f.values[i + 1];
  }
  b[0] += c * -0.5;
  b[n - 1] += c * 0.5;
  const Eigen::VectorXd x = A.ldlt().solve(b);
  for (int i = 0; i < n; ++i) CHECK(std::abs(s.w.values[i + 1] - x[i]) <= 1e-9);
  CHECK(s.w.values.maxCoeff() <= (2.0 + 1e-9));
  CHECK(s.w.values.minCoeff() >= (-1.0 - 1e-9));
}

TEST_CASE("LinearSolve: Errors") {
  const auto d = Domain::interval(0.0, 1.0, 200);
  CHECK_THROWS_AS(linear_solve({d, GridFunction::constant(d, 0.0), GridFunction::zero(d), BoundaryData::constant(d, 0.0)}), InvalidArgument);
  LinearEllipticProblem p{d, GridFunction::constant(d, 1.0),
                          GridFunction::sample(d, [](double x, double) { return std::sin(9.0 * x); }),
                          BoundaryData::constant(d, 0.0), 0.0};
  CHECK_THROWS_AS(linear_solve(p, 1e-14, 3), LinearSolverFailure);
}

TEST_CASE("PicardMap: IdentityNonlinearityIsConstant") {
  std::mt19937_64 rng(6);
  const auto d = Domain::interval(0.0, 1.0, 40);
  const auto f = uniform_noise(d, -1.0, 1.0, rng);
  const auto g = BoundaryData::constant(d, 0.3);
  const auto w0 = harmonic_lift(g, d);
  // Bounds wide enough that w0 + h never reaches the frozen branches.
  const auto t = truncate(phi_library::identity(1.0), -10.0, 10.0, 0.2);
  GridFunction h1 = uniform_noise(d, -1.0, 1.0, rng), h2 = uniform_noise(d, -1.0, 1.0, rng);
  for (auto b : d.boundary_nodes()) h1.values[b] = h2.values[b] = 0.0;
  const auto p1 = picard_map(h1, w0, f, t), p2 = picard_map(h2, w0, f, t);
  CHECK(norm(p1 - p2, NormKind::Linf) < 1e-9);
  for (auto b : d.boundary_nodes()) CHECK(p1.values[b] == 0.0);

  // Π is constant, so with damping λ each residual is (1 − λ) times the last.
  const auto sol = solve_regularized(f, g, phi_library::identity(1.0), 0.2);
  const auto& res = sol.report.picard_residuals;
  REQUIRE(res.size() >= 3u);
  for (std::size_t k = 1; k + 1 < res.size(); ++k) CHECK(std::abs(res[k] / res[k - 1] - 0.5) <= 1e-6);
}

TEST_CASE("PicardMap: ZeroDataGivesZero") {
  const auto d = Domain::interval(0.0, 1.0, 30);
  std::mt19937_64 rng(8);
  GridFunction h = uniform_noise(d, -1.0, 1.0, rng);
  for (auto b : d.boundary_nodes()) h.values[b] = 0.0;
  const auto t = truncate(phi_library::saturated_cubic(), 0.0, 0.0, 0.1);
  const auto p = picard_map(h, GridFunction::zero(d), GridFunction::zero(d), t);
  CHECK(norm(p, NormKind::Linf) < 1e-12);
}

TEST_CASE("SolveRegularized: ConstantData") {
  const auto d = Domain::rectangle(0.0, 1.0, 0.0, 1.0, 10);
  for (double r : {1.0, 1e-3, 1e-8}) {
    const auto s = solve_regularized(GridFunction::constant(d, 0.7), BoundaryData::constant(d, 0.7),
                                     phi_library::saturated_cubic(), r);
    CHECK(std::abs((s.u.values.array() - 0.7).abs().maxCoeff() - 0.0) <= 1e-9);
    CHECK(s.report.m == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(s.report.M == doctest::Approx(0.7).epsilon(1e-14));
  }
}

TEST_CASE("SolveRegularized: ManufacturedCubicConverges") {
  const double r = 0.05;
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const auto d = Domain::interval(0.0, 1.0, n);
    const auto f = GridFunction::sample(d, [&](double x, double) {
      const double u = std::sin(kPi * x), du = kPi * std::cos(kPi * x), ddu = -kPi * kPi * u;
      return -(6.0 * u * du * du + 3.0 * u * u * ddu) - r * ddu + u;
    });
    const auto s = solve_regularized(f, BoundaryData::constant(d, 0.0), phi_library::saturated_cubic(1.5), r);
    double e = 0.0;
    for (Eigen::Index k = 0; k < s.u.values.size(); ++k) {
      e = std::max(e, std::abs(s.u.values[k] - std::sin(kPi * d.coord(k)[0])));
    }
    errs.push_back(e);
  }
  CHECK(std::abs(std::log2(errs[1] / errs[2]) - 2.0) <= 0.2);
}

TEST_CASE("SolveRegularized: FixedPointResidualAtExit") {
  std::mt19937_64 rng(10);
  const auto d = Domain::interval(0.0, 1.0, 64);
  const auto f = uniform_noise(d, -2.0, 3.0, rng);
  const auto g = uniform_boundary_noise(d, -1.0, 1.0, rng);
  const auto s = solve_regularized(f, g, phi_library::saturated_cubic(), 1e-3);
  CHECK(s.report.picard_residuals.back() <= 1e-8);
  CHECK(s.report.max_principle_margin >= -1e-7);
  CHECK(s.u.values.minCoeff() >= (-2.0 - 1e-7));
  CHECK(s.u.values.maxCoeff() <= (3.0 + 1e-7));

  const auto t = truncate(phi_library::saturated_cubic(), s.report.m, s.report.M, 1e-3);
  const auto w0 = harmonic_lift(g, d);
  const auto h = s.u - w0;
  CHECK(norm(picard_map(h, w0, f, t) - h, NormKind::H10) <= (10.0 * 1e-8));
}

TEST_CASE("SolveRegularized: ReportsStall") {
  const auto d = Domain::interval(0.0, 1.0, 64);
  SolveOptions o;
  o.max_picard_iter = 2;
  const auto f = GridFunction::sample(d, [](double x, double) { return std::sin(7.0 * x); });
  try {
    solve_regularized(f, BoundaryData::constant(d, 0.0), phi_library::saturated_cubic(), 1e-3, o);
    FAIL("expected PicardStalled");
  } catch (const PicardStalled& e) {
    CHECK(e.residuals().size() == 2u);
  }
  CHECK_THROWS_AS(solve_regularized(f, BoundaryData::constant(d, 0.0), phi_library::identity(), 0.0), InvalidArgument);
}

TEST_CASE("Estimate: ZeroDataAndCalibration") {
  const auto d = Domain::interval(0.0, 1.0, 32);
  const auto zf = GridFunction::zero(d);
  const auto zg = BoundaryData::constant(d, 0.0);
  const auto s = solve_regularized(zf, zg, phi_library::saturated_cubic(), 0.1);
  CHECK(check_h1_estimate(s.report, zf, zg, 3.0, 1.0).holds);

  CalibrationOptions cal;
  cal.instances = 6;
  const double c = calibrate_estimate_constant(d, phi_library::saturated_cubic(), cal);
  CHECK(c > 0.0);
  CHECK(c == calibrate_estimate_constant(d, phi_library::saturated_cubic(), cal));
}

TEST_CASE("GeneralizedSolve: ZeroDataGivesZero") {
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 16);
  const auto F = constant_net(GridFunction::zero(d), g);
  const std::vector<BoundaryData> G(g.size(), BoundaryData::constant(d, 0.0));
  const auto sol = generalized_solve(F, G, phi_library::saturated_cubic(), eps_viscosity(g));
  for (const auto& m : sol.u.members) CHECK(m.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.trace_exact);
}

TEST_CASE("GeneralizedSolve: BoundedDataGivesBoundedNet") {
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 32);
  const auto F = constant_net(GridFunction::sample(d, [](double x, double) { return std::cos(4.0 * x); }), g);
  const std::vector<BoundaryData> G(g.size(), BoundaryData::sample(d, [](double x, double) { return x - 0.2; }));
  GeneralizedSolveOptions o;
  o.workers = 3;
  const auto sol = generalized_solve(F, G, phi_library::saturated_cubic(), eps_viscosity(g), o);
  const auto c = classify_net(sol.u.norm_net(NormKind::Linf));
  CHECK(c.tag == ScaleTag::Moderate);
  CHECK(*c.exponent >= (-0.05));
  CHECK(sol.trace_exact);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(sol.reports[j].epsilon == doctest::Approx(g[j]).epsilon(1e-14));

  o.workers = 1;
  const auto serial = generalized_solve(F, G, phi_library::saturated_cubic(), eps_viscosity(g), o);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(serial.u.members[j].values == sol.u.members[j].values);
}

TEST_CASE("GeneralizedSolve: MemberFailureNamesEpsilon") {
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 32);
  const auto F = constant_net(GridFunction::sample(d, [](double x, double) { return std::sin(9.0 * x); }), g);
  const std::vector<BoundaryData> G(g.size(), BoundaryData::constant(d, 0.0));
  GeneralizedSolveOptions o;
  o.solve.max_picard_iter = 1;
  CHECK_THROWS_AS(generalized_solve(F, G, phi_library::saturated_cubic(), eps_viscosity(g), o), MemberSolveFailure);
}

TEST_CASE("WeakSolution: ConstantStateHasZeroResidual") {
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 32);
  const auto F = constant_net(GridFunction::constant(d, 0.4), g);
  const std::vector<BoundaryData> G(g.size(), BoundaryData::constant(d, 0.4));
  const auto r = eps_viscosity(g);
  const auto sol = generalized_solve(F, G, phi_library::saturated_cubic(), r);
  const auto rep = weak_solution_check(sol, F, G, phi_library::saturated_cubic(), r, builtin_test_functions(d), 1e-3);
  CHECK(rep.passed);
  // ρ = −r·0.4·∫Δφ; the trapezoid sum of Δφ is O(h²), not zero.
  const auto tests = builtin_test_functions(d);
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const double lap = integrate(tests[t].laplacian_grid_function());
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(std::abs(rep.entries[t].residual[j] - (-g[j] * 0.4 * lap)) <= 1e-12);
    }
  }
}

TEST_CASE("WeakSolution: HypothesisFailureIsReported") {
  // r_ε = ε with data growing like ε^{-1}: r·‖f‖ stays O(1).
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 32);
  std::vector<GridFunction> m;
  for (std::size_t j = 0; j < g.size(); ++j) m.push_back(GridFunction::constant(d, 1.0 / g[j]));
  const GeneralizedGridFunction F(g, m);
  const std::vector<BoundaryData> G(g.size(), BoundaryData::constant(d, 0.0));
  const auto r = eps_viscosity(g);
  const auto sol = generalized_solve(F, G, phi_library::identity(), r);
  CHECK_THROWS_AS(weak_solution_check(sol, F, G, phi_library::identity(), r, builtin_test_functions(d), 1e-3), NotWeaklySolvable);
}

TEST_CASE("NonPositive: Examples") {
  const auto g = EpsilonGrid::geometric();
  const auto d = Domain::interval(0.0, 1.0, 32);
  const auto r = eps_viscosity(g);
  const auto phi = phi_library::saturated_cubic();

  const auto F1 = constant_net(GridFunction::constant(d, -1.0), g);
  const std::vector<BoundaryData> G1(g.size(), BoundaryData::constant(d, -1.0));
  const auto U1 = generalized_solve(F1, G1, phi, r).u;
  CHECK(check_nonpositive(U1, F1, G1));

  const auto F2 = constant_net(build_data("-x*(1-x)", d), g);
  const std::vector<BoundaryData> G2(g.size(), BoundaryData::constant(d, 0.0));
  const auto U2 = generalized_solve(F2, G2, phi, r).u;
  CHECK(check_nonpositive(U2, F2, G2));
  for (const auto& m : U2.members) CHECK(m.values.maxCoeff() <= 1e-7);

  const auto F3 = constant_net(GridFunction::constant(d, 1.0), g);
  CHECK_THROWS_AS(check_nonpositive(U2, F3, G2), PreconditionViolation);
}
