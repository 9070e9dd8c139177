#include "genalg/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "genalg/error.hpp"

namespace genalg {

namespace {

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      while (*end == ' ' || *end == '\t') ++end;
      if (*end != '\0') {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    if (row.size() != columns) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(columns) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

void write_nodes(std::ofstream& out, const Domain& d, const std::vector<Eigen::Index>& nodes,
                 const Eigen::VectorXd& values) {
  out << (d.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto c = d.coord(nodes[k]);
    out << format_real(c[0]) << ',';
    if (d.dim() == 2) out << format_real(c[1]) << ',';
    out << format_real(values[static_cast<Eigen::Index>(k)]) << '\n';
  }
}

Eigen::VectorXd read_nodes(const std::filesystem::path& path, const Domain& d,
                           const std::vector<Eigen::Index>& nodes) {
  const std::size_t cols = d.dim() == 1 ? 2 : 3;
  const auto rows = read_rows(path, cols);
  if (rows.size() != nodes.size()) {
    throw GridMismatch(path.string() + ": " + std::to_string(rows.size()) + " rows for " +
                       std::to_string(nodes.size()) + " nodes");
  }
  const double slack = 1e-9 * d.h();
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto c = d.coord(nodes[k]);
    bool ok = std::abs(rows[k][0] - c[0]) <= slack;
    if (d.dim() == 2) ok = ok && std::abs(rows[k][1] - c[1]) <= slack;
    if (!ok) throw GridMismatch(path.string() + ": row " + std::to_string(k + 1) + " is not at node coordinates");
    v[static_cast<Eigen::Index>(k)] = rows[k][cols - 1];
  }
  return v;
}

std::vector<Eigen::Index> all_nodes(const Domain& d) {
  std::vector<Eigen::Index> n(static_cast<std::size_t>(d.node_count()));
  for (std::size_t k = 0; k < n.size(); ++k) n[k] = static_cast<Eigen::Index>(k);
  return n;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_net_csv(const std::filesystem::path& path, const RealNet& net) {
  auto out = open_out(path);
  out << "epsilon,value\n";
  for (std::size_t j = 0; j < net.size(); ++j) {
    out << format_real(net.epsilon(j)) << ',' << format_real(net[j]) << '\n';
  }
}

RealNet read_net_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path, 2);
  std::vector<double> eps;
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    eps.push_back(rows[j][0]);
    v[static_cast<Eigen::Index>(j)] = rows[j][1];
  }
  return RealNet(EpsilonGrid(std::move(eps)), std::move(v));
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& u) {
  auto out = open_out(path);
  write_nodes(out, u.domain, all_nodes(u.domain), u.values);
}

GridFunction read_grid_csv(const std::filesystem::path& path, const Domain& d) {
  return GridFunction(d, read_nodes(path, d, all_nodes(d)));
}

void write_boundary_csv(const std::filesystem::path& path, const BoundaryData& g) {
  auto out = open_out(path);
  write_nodes(out, g.domain, g.domain.boundary_nodes(), g.values);
}

BoundaryData read_boundary_csv(const std::filesystem::path& path, const Domain& d) {
  return BoundaryData(d, read_nodes(path, d, d.boundary_nodes()));
}

Json to_json(const ScaleClass& c) {
  Json j;
  j["tag"] = to_string(c.tag);
  j["exponent"] = c.exponent ? Json(*c.exponent) : Json(nullptr);
  j["fit_residual"] = c.fit_residual;
  j["k_max"] = c.k_max;
  return j;
}

Json to_json(const AssociationReport& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["associated"] = r.associated;
  j["entries"] = Json::array();
  for (const auto& e : r.entries) {
    j["entries"].push_back({{"test_id", e.test_id}, {"net", e.net}, {"target", e.target}, {"passed", e.passed}});
  }
  return j;
}

Json to_json(const SolveReport& r) {
  return {{"epsilon", r.epsilon},
          {"r_eps", r.r_eps},
          {"m", r.m},
          {"M", r.M},
          {"picard_iters", r.picard_iters},
          {"picard_residuals", r.picard_residuals},
          {"linear_solver_iters", r.linear_solver_iters},
          {"final_damping", r.final_damping},
          {"u_linf", r.u_linf},
          {"u_h1", r.u_h1},
          {"max_principle_margin", r.max_principle_margin},
          {"estimate_ratio", r.estimate_ratio},
          {"nonlinear_residual", r.nonlinear_residual}};
}

Json to_json(const WeakSolutionReport& r, const EpsilonGrid& grid) {
  Json j;
  j["epsilon"] = grid.values();
  j["hyp_net"] = r.hyp_net;
  j["hyp_holds"] = r.hyp_holds;
  j["hyp_slope"] = r.hyp_slope;
  j["decomposition_defect"] = r.decomposition_defect;
  j["decomposition_ok"] = r.decomposition_ok;
  j["passed"] = r.passed;
  j["tests"] = Json::array();
  for (const auto& e : r.entries) {
    j["tests"].push_back({{"test_id", e.test_id},
                          {"residual", e.residual},
                          {"bound", e.bound},
                          {"bound_ok", e.bound_ok},
                          {"tends_to_zero", e.tends_to_zero},
                          {"slope", e.slope}});
  }
  return j;
}

void write_reports_csv(const std::filesystem::path& path, const std::vector<SolveReport>& reports) {
  auto out = open_out(path);
  out << "epsilon,r,m,M,iters,u_linf,u_h1,margin,ratio\n";
  for (const auto& r : reports) {
    out << format_real(r.epsilon) << ',' << format_real(r.r_eps) << ',' << format_real(r.m) << ','
        << format_real(r.M) << ',' << r.picard_iters << ',' << format_real(r.u_linf) << ','
        << format_real(r.u_h1) << ',' << format_real(r.max_principle_margin) << ','
        << format_real(r.estimate_ratio) << '\n';
  }
}

}  // namespace genalg
