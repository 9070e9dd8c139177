#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "genalg/data_ingestion.hpp"
#include "genalg/error.hpp"
#include "genalg/expression.hpp"
#include "genalg/serialization.hpp"

using namespace genalg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "genalg_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("Mollifier: Normalization") {
  // ∫ exp(−1/(1−s²)) ds over [−1, 1].
  CHECK(std::abs(Mollifier(MollifierProfile::Bump).normalization() - 0.44399381616807943) <= 1e-12);
  CHECK(std::abs(Mollifier(MollifierProfile::Triangle).normalization() - 1.0) <= 1e-12);
  CHECK(std::abs(Mollifier(MollifierProfile::Cosine).normalization() - 1.0) <= 1e-12);
  for (auto p : {MollifierProfile::Bump, MollifierProfile::Triangle, MollifierProfile::Cosine}) {
    const Mollifier m(p);
    CHECK(m.raw(1.0) == 0.0);
    CHECK(m.raw(-1.5) == 0.0);
    CHECK(m.peak() > 0.0);
    CHECK(mollifier_profile_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(mollifier_profile_from_string("gauss"), InvalidArgument);
}

TEST_CASE("DiracNet: ScalingAndMass") {
  const auto g = EpsilonGrid::geometric(0.25, 0.5, 14);
  const auto d = Domain::interval(0.0, 1.0, 4095);
  const auto net = dirac_net({0.5, 0.0}, Mollifier(MollifierProfile::Cosine), d, g);
  const auto c = classify_net(net.norm_net(NormKind::Linf), IndexRange{0, 8});
  CHECK(c.tag == ScaleTag::Moderate);
  CHECK(std::abs(*c.exponent - (-1.0)) <= 0.05);
  int resolved = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!net.resolved[j]) continue;
    ++resolved;
    CHECK(std::abs(integrate(net.members[j]) - 1.0) <= kDiracMassTol);
    CHECK(g[j] >= (2.0 * d.h()));
  }
  CHECK(resolved >= 8);
  CHECK_FALSE(net.resolved.back());
  CHECK_THROWS_AS(dirac_net({1.0, 0.0}, Mollifier(), d, g), InvalidArgument);
}

TEST_CASE("DiracNet: TwoDimensional") {
  const auto g = EpsilonGrid::geometric(0.25, 0.5, 10);
  const auto d = Domain::rectangle(0.0, 1.0, 0.0, 1.0, 127);
  const auto net = dirac_net({0.5, 0.5}, Mollifier(MollifierProfile::Triangle), d, g);
  CHECK(std::abs(integrate(net.members[1]) - 1.0) <= 1e-6);
  CHECK(net.resolved[1]);
  CHECK(std::abs(net.members[1].values.maxCoeff() - (1.0 / (g[1] * g[1]))) <= 1e-9 / (g[1] * g[1]));
}

TEST_CASE("DiracViscosityTest: HypothesisRates") {
  const auto g = EpsilonGrid::geometric();
  const auto a = viscosity_for_dirac(1, 2, g);
  CHECK(a.hyp_holds);
  CHECK(std::abs(a.hyp_slope - 2.0) <= 0.05);
  CHECK(a.scale[3] == doctest::Approx(std::pow(g[3], 3)).epsilon(1e-14));
  CHECK_FALSE(viscosity_for_dirac(1, 0, g).hyp_holds);
  const auto b = viscosity_for_dirac(2, 1, g);
  CHECK(b.hyp_holds);
  CHECK(std::abs(b.hyp_slope - 1.0) <= 0.05);
}

TEST_CASE("Expression: Evaluates") {
  CHECK(Expression::parse("1 + 2*3")(0.0) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(Expression::parse("2^3^2")(0.0) == doctest::Approx(512.0).epsilon(1e-14));
  CHECK(Expression::parse("-x^2")(3.0) == doctest::Approx(-9.0).epsilon(1e-14));
  CHECK(Expression::parse("max(x, y) - min(x, y)")(1.0, 4.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(Expression::parse("sin(pi*x) + cos(0) + exp(0) + abs(-2)")(0.5) - 5.0) <= 1e-15);
  CHECK(Expression::parse("eps^2", {"eps"})(0.0, 0.0, 0.1) == doctest::Approx(0.1 * 0.1).epsilon(1e-14));
  CHECK(Expression::parse("x*y").uses("y"));
  CHECK_FALSE(Expression::parse("x + 1").uses("y"));
}

TEST_CASE("Expression: Errors") {
  CHECK_THROWS_AS(Expression::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("eps"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("max(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("x $ 2"), ParseError);
}

TEST_CASE("BuildData: Expressions") {
  const auto d = Domain::interval(0.0, 1.0, 9);
  CHECK(build_data("0", d).values.cwiseAbs().maxCoeff() == 0.0);
  const auto u = build_data("-x*(1-x)", d);
  for (Eigen::Index k = 0; k < u.values.size(); ++k) {
    const double x = d.coord(k)[0];
    CHECK(u.values[k] == doctest::Approx(-x * (1 - x)).epsilon(1e-14));
  }
  const auto b = build_boundary("1 + x", d);
  CHECK(b.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  const auto r = build_viscosity_net("eps^2", EpsilonGrid::geometric());
  CHECK(r[0] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("Csv: GridRoundTripIsBitExact") {
  std::mt19937_64 rng(3);
  const auto d = Domain::rectangle(0.0, 1.0, -1.0, 2.0, 7);
  const auto u = uniform_noise(d, -1e3, 1e-3, rng);
  const auto path = scratch("grid.csv");
  write_grid_csv(path, u);
  CHECK(read_grid_csv(path, d).values == u.values);
  CHECK(build_data(path.string(), d).values == u.values);
  CHECK_THROWS_AS(read_grid_csv(path, Domain::rectangle(0.0, 1.0, -1.0, 2.0, 8)), Error);

  const auto g = uniform_boundary_noise(d, 0.0, 1.0, rng);
  const auto bpath = scratch("boundary.csv");
  write_boundary_csv(bpath, g);
  CHECK(read_boundary_csv(bpath, d).values == g.values);
}

TEST_CASE("Csv: NetRoundTripIsBitExact") {
  const auto g = EpsilonGrid::geometric();
  const auto n = RealNet::from_function(g, [](double e) { return std::sin(1.0 / e) / e; });
  const auto path = scratch("net.csv");
  write_net_csv(path, n);
  const auto back = read_net_csv(path);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(back[j] == n[j]);
    CHECK(back.grid()[j] == g[j]);
  }
}

TEST_CASE("Json: ScaleClassFields") {
  const auto c = classify_net(RealNet::from_function(EpsilonGrid::geometric(), [](double e) { return e * e; }));
  const auto j = to_json(c);
  CHECK(j.at("tag") == "Moderate");
  CHECK(std::abs(j.at("exponent").get<double>() - 2.0) <= 0.05);
}
