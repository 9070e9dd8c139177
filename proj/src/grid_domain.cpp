#include "genalg/grid_domain.hpp"

#include <cmath>
#include <numbers>

#include "genalg/error.hpp"
#include "genalg/parallel.hpp"

namespace genalg {

Domain Domain::interval(double a, double b, int n) {
  if (!(b > a)) throw InvalidArgument("interval needs a < b");
  if (n < 2) throw InvalidArgument("domain needs at least 2 interior nodes per axis");
  Domain d;
  d.dim_ = 1;
  d.n_ = n;
  d.xa_ = a;
  d.xb_ = b;
  d.hx_ = (b - a) / (n + 1);
  d.hy_ = 1.0;
  d.build();
  return d;
}

Domain Domain::rectangle(double xa, double xb, double ya, double yb, int n) {
  if (!(xb > xa) || !(yb > ya)) throw InvalidArgument("rectangle needs positive extents");
  if (n < 2) throw InvalidArgument("domain needs at least 2 interior nodes per axis");
  Domain d;
  d.dim_ = 2;
  d.n_ = n;
  d.xa_ = xa;
  d.xb_ = xb;
  d.ya_ = ya;
  d.yb_ = yb;
  d.hx_ = (xb - xa) / (n + 1);
  d.hy_ = (yb - ya) / (n + 1);
  d.build();
  return d;
}

Eigen::Index Domain::node_count() const noexcept {
  const auto m = static_cast<Eigen::Index>(nodes_per_axis());
  return dim_ == 1 ? m : m * m;
}

double Domain::measure() const noexcept {
  return dim_ == 1 ? (xb_ - xa_) : (xb_ - xa_) * (yb_ - ya_);
}

std::array<int, 2> Domain::ij(Eigen::Index node) const noexcept {
  const auto m = static_cast<Eigen::Index>(nodes_per_axis());
  return {static_cast<int>(node % m), static_cast<int>(node / m)};
}

std::array<double, 2> Domain::coord(Eigen::Index node) const noexcept {
  const auto [i, j] = ij(node);
  return {x(i), y(j)};
}

bool Domain::is_boundary(Eigen::Index node) const noexcept {
  const auto [i, j] = ij(node);
  const int last = n_ + 1;
  if (i == 0 || i == last) return true;
  return dim_ == 2 && (j == 0 || j == last);
}

bool Domain::contains(const std::array<double, 2>& p) const noexcept {
  const bool in_x = p[0] >= xa_ && p[0] <= xb_;
  return dim_ == 1 ? in_x : in_x && p[1] >= ya_ && p[1] <= yb_;
}

bool Domain::strictly_inside(const std::array<double, 2>& p) const noexcept {
  const bool in_x = p[0] > xa_ && p[0] < xb_;
  return dim_ == 1 ? in_x : in_x && p[1] > ya_ && p[1] < yb_;
}

void Domain::build() {
  const Eigen::Index count = node_count();
  boundary_.clear();
  interior_.clear();
  for (Eigen::Index k = 0; k < count; ++k) {
    (is_boundary(k) ? boundary_ : interior_).push_back(k);
  }
  const int m = nodes_per_axis();
  Eigen::VectorXd wx(m), wy = Eigen::VectorXd::Ones(dim_ == 1 ? 1 : m);
  wx.setConstant(hx_);
  wx[0] = wx[m - 1] = 0.5 * hx_;
  if (dim_ == 2) {
    wy.setConstant(hy_);
    wy[0] = wy[m - 1] = 0.5 * hy_;
  }
  weights_.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto [i, j] = ij(k);
    weights_[k] = wx[i] * wy[j];
  }
}

GridFunction::GridFunction(Domain d, Eigen::VectorXd v) : domain(std::move(d)), values(std::move(v)) {
  if (values.size() != domain.node_count()) {
    throw InvalidArgument("grid function needs one value per node");
  }
  if (!values.allFinite()) throw InvalidArgument("grid function values must be finite");
}

GridFunction GridFunction::zero(const Domain& d) { return constant(d, 0.0); }

GridFunction GridFunction::constant(const Domain& d, double c) {
  return GridFunction(d, Eigen::VectorXd::Constant(d.node_count(), c));
}

GridFunction GridFunction::sample(const Domain& d, const PointFunction& f) {
  Eigen::VectorXd v(d.node_count());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const auto p = d.coord(k);
    v[k] = f(p[0], p[1]);
  }
  return GridFunction(d, std::move(v));
}

namespace {

void require_same_domain(const Domain& a, const Domain& b) {
  if (!(a == b)) throw GridMismatch("grid functions live on different domains");
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_domain(a.domain, b.domain);
  return {a.domain, a.values + b.values};
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_domain(a.domain, b.domain);
  return {a.domain, a.values - b.values};
}

GridFunction operator*(double c, const GridFunction& a) { return {a.domain, c * a.values}; }

BoundaryData::BoundaryData(Domain d, Eigen::VectorXd v) : domain(std::move(d)), values(std::move(v)) {
  if (values.size() != static_cast<Eigen::Index>(domain.boundary_nodes().size())) {
    throw InvalidArgument("boundary data needs one value per boundary node");
  }
  if (!values.allFinite()) throw InvalidArgument("boundary values must be finite");
}

BoundaryData BoundaryData::constant(const Domain& d, double c) {
  return BoundaryData(
      d, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d.boundary_nodes().size()), c));
}

BoundaryData BoundaryData::sample(const Domain& d, const PointFunction& f) {
  const auto& nodes = d.boundary_nodes();
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto p = d.coord(nodes[k]);
    v[static_cast<Eigen::Index>(k)] = f(p[0], p[1]);
  }
  return BoundaryData(d, std::move(v));
}

BoundaryData BoundaryData::trace(const GridFunction& u) {
  const auto& nodes = u.domain.boundary_nodes();
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) v[static_cast<Eigen::Index>(k)] = u.values[nodes[k]];
  return BoundaryData(u.domain, std::move(v));
}

namespace {

// Squared L² norm of the forward-difference gradient. Edges along a
// boundary row carry half the transverse weight (trapezoid in y).
double h10_squared(const GridFunction& u) {
  const Domain& d = u.domain;
  const int m = d.nodes_per_axis();
  const auto& v = u.values;
  if (d.dim() == 1) {
    double acc = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      const double g = (v[i + 1] - v[i]) / d.hx();
      acc += g * g * d.hx();
    }
    return acc;
  }
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const double wy = (j == 0 || j == m - 1) ? 0.5 * d.hy() : d.hy();
    for (int i = 0; i + 1 < m; ++i) {
      const double g = (v[d.index(i + 1, j)] - v[d.index(i, j)]) / d.hx();
      acc += g * g * d.hx() * wy;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double wx = (i == 0 || i == m - 1) ? 0.5 * d.hx() : d.hx();
    for (int j = 0; j + 1 < m; ++j) {
      const double g = (v[d.index(i, j + 1)] - v[d.index(i, j)]) / d.hy();
      acc += g * g * d.hy() * wx;
    }
  }
  return acc;
}

}  // namespace

double integrate(const GridFunction& u) { return u.domain.quadrature_weights().dot(u.values); }

double inner(const GridFunction& u, const GridFunction& v) {
  require_same_domain(u.domain, v.domain);
  return u.domain.quadrature_weights().dot(u.values.cwiseProduct(v.values));
}

double norm(const GridFunction& u, NormKind which) {
  switch (which) {
    case NormKind::Linf:
      return u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
    case NormKind::L1:
      return u.domain.quadrature_weights().dot(u.values.cwiseAbs());
    case NormKind::L2:
      return std::sqrt(u.domain.quadrature_weights().dot(u.values.cwiseAbs2()));
    case NormKind::H10:
      return std::sqrt(h10_squared(u));
    case NormKind::H1:
      return std::sqrt(u.domain.quadrature_weights().dot(u.values.cwiseAbs2()) + h10_squared(u));
  }
  return 0.0;
}

double e_norm(const GridFunction& u) { return norm(u, NormKind::Linf) + norm(u, NormKind::H1); }

GridFunction positive_part(const GridFunction& u) {
  return {u.domain, u.values.cwiseMax(0.0)};
}

namespace {

// Start index of a 4-point stencil around coordinate t, and its Lagrange
// weights.
std::pair<int, std::array<double, 4>> cubic_stencil(double t0, double h, int nodes, double t) {
  const double s = (t - t0) / h;
  int start = static_cast<int>(std::floor(s)) - 1;
  start = std::clamp(start, 0, nodes - 4);
  std::array<double, 4> w{};
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) l *= (s - (start + b)) / static_cast<double>(a - b);
    }
    w[static_cast<std::size_t>(a)] = l;
  }
  return {start, w};
}

}  // namespace

double interpolate(const GridFunction& u, const std::array<double, 2>& p) {
  const Domain& d = u.domain;
  if (!d.contains(p)) throw InvalidArgument("interpolation point outside the domain");
  const int m = d.nodes_per_axis();
  const auto [sx, wx] = cubic_stencil(d.x_min(), d.hx(), m, p[0]);
  if (d.dim() == 1) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) acc += wx[static_cast<std::size_t>(a)] * u.values[sx + a];
    return acc;
  }
  const auto [sy, wy] = cubic_stencil(d.y_min(), d.hy(), m, p[1]);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    for (int a = 0; a < 4; ++a) {
      acc += wx[static_cast<std::size_t>(a)] * wy[static_cast<std::size_t>(b)] *
             u.values[d.index(sx + a, sy + b)];
    }
  }
  return acc;
}

GeneralizedGridFunction::GeneralizedGridFunction(EpsilonGrid g, std::vector<GridFunction> m,
                                                 NormTag tag)
    : grid(std::move(g)), members(std::move(m)), norm_tag(tag), resolved(members.size(), true) {
  if (members.size() != grid.size()) {
    throw InvalidArgument("generalized grid function needs one member per epsilon");
  }
  for (const auto& u : members) require_same_domain(u.domain, members.front().domain);
}

RealNet GeneralizedGridFunction::norm_net(NormKind which) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    v[static_cast<Eigen::Index>(j)] = norm(members[j], which);
  }
  return RealNet(grid, std::move(v));
}

RealNet GeneralizedGridFunction::ambient_norm_net() const {
  if (norm_tag == NormTag::Linf) return norm_net(NormKind::Linf);
  return norm_net(NormKind::Linf) + norm_net(NormKind::H1);
}

bool GeneralizedGridFunction::is_moderate(int k_max, double tol) const {
  return classify_net(ambient_norm_net(), k_max, tol).in_ring();
}

namespace {

void require_compatible(const GeneralizedGridFunction& a, const GeneralizedGridFunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("generalized functions on different epsilon grids");
  require_same_domain(a.domain(), b.domain());
}

GeneralizedGridFunction combine(const GeneralizedGridFunction& a, const GeneralizedGridFunction& b,
                                double sign) {
  require_compatible(a, b);
  std::vector<GridFunction> m;
  m.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    m.emplace_back(a.members[j].domain, a.members[j].values + sign * b.members[j].values);
  }
  GeneralizedGridFunction out(a.grid, std::move(m), a.norm_tag);
  for (std::size_t j = 0; j < a.size(); ++j) out.resolved[j] = a.resolved[j] && b.resolved[j];
  return out;
}

}  // namespace

GeneralizedGridFunction operator+(const GeneralizedGridFunction& a,
                                  const GeneralizedGridFunction& b) {
  return combine(a, b, 1.0);
}

GeneralizedGridFunction operator-(const GeneralizedGridFunction& a,
                                  const GeneralizedGridFunction& b) {
  return combine(a, b, -1.0);
}

GeneralizedGridFunction map_members(const GeneralizedGridFunction& u,
                                    const std::function<GridFunction(const GridFunction&)>& f,
                                    int workers) {
  std::vector<GridFunction> out(u.size());
  parallel_for(u.size(), workers, [&](std::size_t j) { out[j] = f(u.members[j]); });
  GeneralizedGridFunction result(u.grid, std::move(out), u.norm_tag);
  result.resolved = u.resolved;
  return result;
}

GeneralizedGridFunction embed_constant(const GridFunction& u, const EpsilonGrid& grid) {
  return GeneralizedGridFunction(grid, std::vector<GridFunction>(grid.size(), u));
}

GeneralizedGridFunction gen_positive_part(const GeneralizedGridFunction& u) {
  return map_members(u, [](const GridFunction& m) { return positive_part(m); });
}

bool gen_leq(const GeneralizedGridFunction& u, const GeneralizedGridFunction& v, int k_max,
             double tol) {
  require_compatible(u, v);
  Eigen::VectorXd net(static_cast<Eigen::Index>(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) {
    net[static_cast<Eigen::Index>(j)] =
        (u.members[j].values - v.members[j].values).cwiseMax(0.0).maxCoeff();
  }
  return classify_net(RealNet(u.grid, std::move(net)), k_max, tol).negligible();
}

namespace {

struct Profile1d {
  double value, second;
};

Profile1d test_profile(double t, double a, double b, int k) {
  const double len = b - a;
  const double s = t - a;
  const double q = s * (len - s);
  const double dq = len - 2.0 * s;
  const double p = q * q;
  const double dp = 2.0 * q * dq;
  const double d2p = 2.0 * dq * dq - 4.0 * q;
  const double w = k * std::numbers::pi / len;
  const double c = std::cos(w * s);
  const double sn = std::sin(w * s);
  return {p * c, d2p * c - 2.0 * dp * w * sn - p * w * w * c};
}

}  // namespace

std::vector<TestFunctionH20> builtin_test_functions(const Domain& d, int count) {
  std::vector<TestFunctionH20> out;
  for (int k = 0; k < count; ++k) {
    TestFunctionH20 t;
    t.id = "phi_" + std::to_string(k);
    t.domain = d;
    t.phi.resize(d.node_count());
    t.laplacian.resize(d.node_count());
    for (Eigen::Index node = 0; node < d.node_count(); ++node) {
      const auto p = d.coord(node);
      const Profile1d fx = test_profile(p[0], d.x_min(), d.x_max(), k);
      if (d.dim() == 1) {
        t.phi[node] = fx.value;
        t.laplacian[node] = fx.second;
      } else {
        const Profile1d fy = test_profile(p[1], d.y_min(), d.y_max(), k);
        t.phi[node] = fx.value * fy.value;
        t.laplacian[node] = fx.second * fy.value + fx.value * fy.second;
      }
    }
    for (Eigen::Index node : d.boundary_nodes()) t.phi[node] = 0.0;
    out.push_back(std::move(t));
  }
  return out;
}

std::string to_string(AssocMode m) { return m == AssocMode::Hminus2 ? "Hminus2" : "L1"; }

bool tail_tends_to_zero(std::span<const double> values, const std::vector<bool>& mask,
                        double tol) {
  std::vector<double> sel;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (mask.empty() || (j < mask.size() && mask[j])) sel.push_back(std::abs(values[j]));
  }
  if (sel.size() < kTailPoints) return false;
  const std::size_t start = sel.size() - kTailPoints;
  for (std::size_t j = start; j < sel.size(); ++j) {
    if (!(sel[j] < tol)) return false;
    if (j > start && sel[j] > kNumericalZero && sel[j] > kTailGrowthFactor * sel[j - 1]) {
      return false;
    }
  }
  return true;
}

AssociationReport assoc_weak(const GeneralizedGridFunction& u, const PairingTarget& target,
                             const std::vector<TestFunctionH20>& tests, AssocMode mode,
                             double tol) {
  AssociationReport report;
  report.mode = mode;
  const Domain& dom = u.domain();

  if (mode == AssocMode::L1) {
    const auto* t = std::get_if<GridFunction>(&target);
    if (t == nullptr) throw InvalidArgument("L1 association needs a regular (grid function) target");
    require_same_domain(dom, t->domain);
    AssociationEntry e;
    e.test_id = "L1";
    for (const auto& m : u.members) e.net.push_back(norm(m - *t, NormKind::L1));
    e.passed = tail_tends_to_zero(e.net, u.resolved, tol);
    report.associated = e.passed;
    report.entries.push_back(std::move(e));
    return report;
  }

  if (tests.empty()) throw InvalidArgument("H^-2 association needs at least one test function");
  report.associated = true;
  for (const auto& phi : tests) {
    if (phi.laplacian.size() != dom.node_count()) {
      throw InvalidArgument("test function " + phi.id + " lacks Laplacian data");
    }
    require_same_domain(dom, phi.domain);
    const GridFunction phig = phi.as_grid_function();
    AssociationEntry e;
    e.test_id = phi.id;
    if (const auto* t = std::get_if<GridFunction>(&target)) {
      e.target = inner(*t, phig);
    } else {
      const auto& pm = std::get<PointMass>(target);
      e.target = pm.weight * interpolate(phig, pm.location);
    }
    for (const auto& m : u.members) e.net.push_back(inner(m, phig) - e.target);
    e.passed = tail_tends_to_zero(e.net, u.resolved, tol);
    report.associated = report.associated && e.passed;
    report.entries.push_back(std::move(e));
  }
  return report;
}

RealNet extend_functional(const GeneralizedGridFunction& u, const Functional& functional) {
  const Domain& dom = u.domain();
  if (functional.kind == Functional::Kind::PointSample && !dom.contains(functional.point)) {
    throw InvalidArgument("point_sample location lies outside the domain");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) {
    const GridFunction& m = u.members[j];
    double val = 0.0;
    switch (functional.kind) {
      case Functional::Kind::Mean: val = integrate(m) / dom.measure(); break;
      case Functional::Kind::Integral: val = integrate(m); break;
      case Functional::Kind::PointSample: val = interpolate(m, functional.point); break;
    }
    v[static_cast<Eigen::Index>(j)] = val;
  }
  return RealNet(u.grid, std::move(v));
}

}  // namespace genalg
