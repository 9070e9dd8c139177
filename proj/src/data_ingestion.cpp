#include "genalg/data_ingestion.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "genalg/error.hpp"
#include "genalg/expression.hpp"
#include "genalg/serialization.hpp"

namespace genalg {

std::string to_string(MollifierProfile p) {
  switch (p) {
    case MollifierProfile::Bump: return "bump";
    case MollifierProfile::Triangle: return "triangle";
    case MollifierProfile::Cosine: return "cosine";
  }
  return "bump";
}

MollifierProfile mollifier_profile_from_string(const std::string& s) {
  if (s == "bump") return MollifierProfile::Bump;
  if (s == "triangle") return MollifierProfile::Triangle;
  if (s == "cosine") return MollifierProfile::Cosine;
  throw InvalidArgument("unknown mollifier profile '" + s + "'");
}

Mollifier::Mollifier(MollifierProfile profile) : profile_(profile) {
  const int n = kQuadratureIntervals;
  const double h = 2.0 / n;
  double acc = raw(-1.0) + raw(1.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * raw(-1.0 + i * h);
  normalization_ = acc * h / 3.0;
}

double Mollifier::raw(double s) const {
  const double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  switch (profile_) {
    case MollifierProfile::Bump: return std::exp(-1.0 / (1.0 - s * s));
    case MollifierProfile::Triangle: return 1.0 - a;
    case MollifierProfile::Cosine: return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
  }
  return 0.0;
}

GeneralizedGridFunction dirac_net(const std::array<double, 2>& x0, const Mollifier& moll,
                                  const Domain& d, const EpsilonGrid& grid) {
  if (!d.strictly_inside(x0)) throw InvalidArgument("Dirac location must be interior to the domain");
  std::vector<GridFunction> members;
  std::vector<bool> resolved;
  members.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double eps = grid[j];
    const double scale = std::pow(eps, -d.dim());
    GridFunction u = GridFunction::sample(d, [&](double x, double y) {
      double v = scale * moll((x - x0[0]) / eps);
      if (d.dim() == 2) v *= moll((y - x0[1]) / eps);
      return v;
    });
    bool inside = x0[0] - eps >= d.x_min() && x0[0] + eps <= d.x_max();
    if (d.dim() == 2) inside = inside && x0[1] - eps >= d.y_min() && x0[1] + eps <= d.y_max();
    const bool fine = eps >= 2.0 * d.h();
    const bool mass_ok = std::abs(integrate(u) - 1.0) <= kDiracMassTol;
    resolved.push_back(inside && fine && mass_ok);
    members.push_back(std::move(u));
  }
  GeneralizedGridFunction out(grid, std::move(members));
  out.resolved = std::move(resolved);
  return out;
}

DiracViscosity viscosity_for_dirac(int d, int q, const EpsilonGrid& grid, const Mollifier& moll,
                                   double tol) {
  if (q < 0) throw InvalidArgument("q must be non-negative");
  if (d != 1 && d != 2) throw InvalidArgument("dimension must be 1 or 2");
  DiracViscosity out;
  const RealNet r = RealNet::from_function(grid, [&](double e) { return std::pow(e, d + q); });
  out.scale = validate_viscosity(r, kDefaultKMax, kDefaultClassTol, static_cast<double>(d + q));
  const double peak = std::pow(moll.peak(), d);
  out.hyp_evidence = RealNet::from_function(
      grid, [&](double e) { return std::pow(e, d + q) * std::pow(e, -d) * peak; });
  const auto& v = out.hyp_evidence.values();
  out.hyp_holds = tail_tends_to_zero(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), {}, tol);
  const IndexRange w = tail_window(grid);
  std::vector<double> e(grid.values().begin() + static_cast<std::ptrdiff_t>(w.begin),
                        grid.values().begin() + static_cast<std::ptrdiff_t>(w.end));
  std::vector<double> y(v.data() + w.begin, v.data() + w.end);
  out.hyp_slope = fit_loglog(e, y).slope;
  return out;
}

namespace {

bool names_file(const std::string& spec) {
  std::error_code ec;
  return spec.ends_with(".csv") || std::filesystem::is_regular_file(spec, ec);
}

Expression space_expression(const std::string& spec, const Domain& d) {
  return Expression::parse(spec, d.dim() == 1 ? std::vector<std::string>{"x"}
                                              : std::vector<std::string>{"x", "y"});
}

}  // namespace

GridFunction build_data(const std::string& spec, const Domain& d) {
  if (names_file(spec)) return read_grid_csv(spec, d);
  const Expression e = space_expression(spec, d);
  return GridFunction::sample(d, [&](double x, double y) { return e(x, y); });
}

BoundaryData build_boundary(const std::string& spec, const Domain& d) {
  if (names_file(spec)) return read_boundary_csv(spec, d);
  const Expression e = space_expression(spec, d);
  return BoundaryData::sample(d, [&](double x, double y) { return e(x, y); });
}

RealNet build_viscosity_net(const std::string& expression, const EpsilonGrid& grid) {
  const Expression e = Expression::parse(expression, {"eps"});
  return RealNet::from_function(grid, [&](double eps) { return e(0.0, 0.0, eps); });
}

GeneralizedGridFunction constant_net(const GridFunction& u, const EpsilonGrid& grid) {
  return embed_constant(u, grid);
}

GridFunction uniform_noise(const Domain& d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(d.node_count());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = dist(rng);
  return GridFunction(d, std::move(v));
}

BoundaryData uniform_boundary_noise(const Domain& d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.boundary_nodes().size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = dist(rng);
  return BoundaryData(d, std::move(v));
}

}  // namespace genalg
