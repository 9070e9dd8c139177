#pragma once

// CSV and JSON persistence. Reals are written with 17 significant digits so a
// write/read cycle is bit-exact.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "genalg/dirichlet_solver.hpp"
#include "genalg/grid_domain.hpp"
#include "genalg/scale_ring.hpp"

namespace genalg {

using Json = nlohmann::json;

std::string format_real(double v);

/// Header `epsilon,value`, one row per grid point.
void write_net_csv(const std::filesystem::path& path, const RealNet& net);
RealNet read_net_csv(const std::filesystem::path& path);

/// Header `x,value` (1D) or `x,y,value` (2D), one row per node.
void write_grid_csv(const std::filesystem::path& path, const GridFunction& u);
/// Rows must match the domain's node count and coordinates (to 1e-9·h).
GridFunction read_grid_csv(const std::filesystem::path& path, const Domain& d);

/// Same layout as grid CSV, restricted to boundary nodes in Domain order.
void write_boundary_csv(const std::filesystem::path& path, const BoundaryData& g);
BoundaryData read_boundary_csv(const std::filesystem::path& path, const Domain& d);

Json to_json(const ScaleClass& c);
Json to_json(const AssociationReport& r);
Json to_json(const SolveReport& r);
Json to_json(const WeakSolutionReport& r, const EpsilonGrid& grid);

/// epsilon,r,m,M,iters,u_linf,u_h1,margin,ratio
void write_reports_csv(const std::filesystem::path& path, const std::vector<SolveReport>& reports);

}  // namespace genalg
