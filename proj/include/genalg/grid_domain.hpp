#pragma once

// Discrete function spaces on uniform 1D intervals and 2D rectangles, and the
// generalized (ε-indexed) grid functions built over them.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "genalg/scale_ring.hpp"

namespace genalg {

/// Uniform tensor mesh with explicit boundary nodes. Nodes are numbered
/// i + j·(n+2) with i along x; in 1D j is always 0.
class Domain {
 public:
  Domain() = default;

  static Domain interval(double a, double b, int n);
  static Domain rectangle(double xa, double xb, double ya, double yb, int n);

  int dim() const noexcept { return dim_; }
  int interior_per_axis() const noexcept { return n_; }
  int nodes_per_axis() const noexcept { return n_ + 2; }
  Eigen::Index node_count() const noexcept;

  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  /// Smallest mesh width.
  double h() const noexcept { return dim_ == 1 ? hx_ : std::min(hx_, hy_); }

  double x_min() const noexcept { return xa_; }
  double x_max() const noexcept { return xb_; }
  double y_min() const noexcept { return ya_; }
  double y_max() const noexcept { return yb_; }
  double measure() const noexcept;

  Eigen::Index index(int i, int j = 0) const noexcept {
    return static_cast<Eigen::Index>(i) + static_cast<Eigen::Index>(j) * nodes_per_axis();
  }
  double x(int i) const noexcept { return xa_ + i * hx_; }
  double y(int j) const noexcept { return dim_ == 1 ? 0.0 : ya_ + j * hy_; }
  std::array<double, 2> coord(Eigen::Index node) const noexcept;
  std::array<int, 2> ij(Eigen::Index node) const noexcept;

  bool is_boundary(Eigen::Index node) const noexcept;
  bool contains(const std::array<double, 2>& p) const noexcept;
  bool strictly_inside(const std::array<double, 2>& p) const noexcept;

  /// Boundary node indices in ascending order; BoundaryData follows it.
  const std::vector<Eigen::Index>& boundary_nodes() const noexcept { return boundary_; }
  const std::vector<Eigen::Index>& interior_nodes() const noexcept { return interior_; }

  /// Trapezoidal quadrature weights, one per node.
  const Eigen::VectorXd& quadrature_weights() const noexcept { return weights_; }

  bool operator==(const Domain& o) const noexcept {
    return dim_ == o.dim_ && n_ == o.n_ && xa_ == o.xa_ && xb_ == o.xb_ && ya_ == o.ya_ &&
           yb_ == o.yb_;
  }

 private:
  void build();

  int dim_ = 1;
  int n_ = 0;
  double xa_ = 0.0, xb_ = 1.0, ya_ = 0.0, yb_ = 0.0;
  double hx_ = 1.0, hy_ = 1.0;
  std::vector<Eigen::Index> boundary_;
  std::vector<Eigen::Index> interior_;
  Eigen::VectorXd weights_;
};

using PointFunction = std::function<double(double, double)>;

struct GridFunction {
  Domain domain;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(Domain d, Eigen::VectorXd v);

  static GridFunction zero(const Domain& d);
  static GridFunction constant(const Domain& d, double c);
  static GridFunction sample(const Domain& d, const PointFunction& f);
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);

/// Values at Domain::boundary_nodes(), in that order.
struct BoundaryData {
  Domain domain;
  Eigen::VectorXd values;

  BoundaryData() = default;
  BoundaryData(Domain d, Eigen::VectorXd v);

  static BoundaryData constant(const Domain& d, double c);
  static BoundaryData sample(const Domain& d, const PointFunction& f);
  static BoundaryData trace(const GridFunction& u);

  double linf() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

enum class NormKind { Linf, L1, L2, H1, H10 };

double norm(const GridFunction& u, NormKind which);
/// ‖u‖_E = ‖u‖_{L∞} + ‖u‖_{H¹}.
double e_norm(const GridFunction& u);
double integrate(const GridFunction& u);
double inner(const GridFunction& u, const GridFunction& v);

GridFunction positive_part(const GridFunction& u);

/// Cubic (bicubic in 2D) Lagrange interpolation from the nodal values.
double interpolate(const GridFunction& u, const std::array<double, 2>& p);

enum class NormTag { Linf, H1Linf };

/// One grid function per ε, all on one Domain. `resolved` marks members that
/// are trusted for asymptotic assertions; it defaults to all true.
struct GeneralizedGridFunction {
  EpsilonGrid grid;
  std::vector<GridFunction> members;
  NormTag norm_tag = NormTag::Linf;
  std::vector<bool> resolved;

  GeneralizedGridFunction() = default;
  GeneralizedGridFunction(EpsilonGrid g, std::vector<GridFunction> m,
                          NormTag tag = NormTag::Linf);

  const Domain& domain() const { return members.front().domain; }
  std::size_t size() const noexcept { return members.size(); }

  RealNet norm_net(NormKind which) const;
  /// Net of member norms in the ambient norm selected by norm_tag.
  RealNet ambient_norm_net() const;
  bool is_moderate(int k_max = kDefaultKMax, double tol = kDefaultClassTol) const;
};

GeneralizedGridFunction operator+(const GeneralizedGridFunction& a,
                                  const GeneralizedGridFunction& b);
GeneralizedGridFunction operator-(const GeneralizedGridFunction& a,
                                  const GeneralizedGridFunction& b);

/// Member-wise map; members are independent so the map runs on `workers`
/// threads with results stored in ε order.
GeneralizedGridFunction map_members(const GeneralizedGridFunction& u,
                                    const std::function<GridFunction(const GridFunction&)>& f,
                                    int workers = 1);

GeneralizedGridFunction embed_constant(const GridFunction& u, const EpsilonGrid& grid);

/// Member-wise positive part. Moderateness of the result follows from
/// |(r+s)⁺ − r⁺| <= |s|, i.e. the map is 1-Lipschitz in every norm used.
GeneralizedGridFunction gen_positive_part(const GeneralizedGridFunction& u);

/// U <= V iff ‖(u_ε − v_ε)⁺‖_{L∞} is negligible.
bool gen_leq(const GeneralizedGridFunction& u, const GeneralizedGridFunction& v,
             int k_max = kDefaultKMax, double tol = kDefaultClassTol);

/// Discrete H²₀ test function with its analytic Laplacian.
struct TestFunctionH20 {
  std::string id;
  Domain domain;
  Eigen::VectorXd phi;
  Eigen::VectorXd laplacian;

  GridFunction as_grid_function() const { return {domain, phi}; }
  GridFunction laplacian_grid_function() const { return {domain, laplacian}; }
};

/// φ_k(x) = ((x−a)(b−x))²·cos(kπ(x−a)/(b−a)), k = 0..count−1; tensor
/// products φ_k(x)φ_k(y) in 2D.
std::vector<TestFunctionH20> builtin_test_functions(const Domain& d, int count = 3);

struct PointMass {
  std::array<double, 2> location{0.0, 0.0};
  double weight = 1.0;
};

using PairingTarget = std::variant<GridFunction, PointMass>;

enum class AssocMode { Hminus2, L1 };

std::string to_string(AssocMode m);

inline constexpr std::size_t kTailPoints = 5;
inline constexpr double kTailGrowthFactor = 1.2;
/// Tail values below this magnitude count as converged regardless of trend.
inline constexpr double kNumericalZero = 1e-12;

/// Last kTailPoints selected values are below tol and each is at most
/// kTailGrowthFactor times its predecessor. `mask` selects members (empty
/// means all).
bool tail_tends_to_zero(std::span<const double> values, const std::vector<bool>& mask,
                        double tol);

struct AssociationEntry {
  std::string test_id;
  std::vector<double> net;  // pairing minus target, per ε
  double target = 0.0;
  bool passed = false;
};

struct AssociationReport {
  AssocMode mode = AssocMode::Hminus2;
  std::vector<AssociationEntry> entries;
  bool associated = false;
};

AssociationReport assoc_weak(const GeneralizedGridFunction& u, const PairingTarget& target,
                             const std::vector<TestFunctionH20>& tests, AssocMode mode,
                             double tol);

struct Functional {
  enum class Kind { Mean, Integral, PointSample };
  Kind kind = Kind::Integral;
  std::array<double, 2> point{0.0, 0.0};

  static Functional mean() { return {Kind::Mean, {}}; }
  static Functional integral() { return {Kind::Integral, {}}; }
  static Functional point_sample(double x, double y = 0.0) { return {Kind::PointSample, {x, y}}; }
};

/// Applies a continuous linear functional member-wise. Since |θ(u)| <= C‖u‖
/// the output net is moderate whenever U is.
RealNet extend_functional(const GeneralizedGridFunction& u, const Functional& functional);

}  // namespace genalg
