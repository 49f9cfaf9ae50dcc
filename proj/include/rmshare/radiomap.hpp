// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rmshare/channel.hpp"

namespace rmshare {

struct CsiSample {
  std::string tx_id;
  Position rx;
  double pathloss_db = 0.0;
};

struct CsiDataset {
  std::vector<CsiSample> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<std::string> tx_ids() const; // sorted, unique
};

/// Reads `tx_id,x_m,y_m,pathloss_db` CSV. Errors carry the 1-based line number.
CsiDataset ingest_dataset(const std::filesystem::path& path);
CsiDataset parse_dataset(std::istream& in, const std::string& source_name);
void write_dataset(const CsiDataset& data, const std::filesystem::path& path);

struct BoundingBox {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
};

/// Samples `field` on a regular lattice of `spacing_m` covering `box`, for every transmitter.
CsiDataset sample_field(const PropagationField& field, std::span<const Transmitter> txs,
                        const BoundingBox& box, double spacing_m);

/// Box enclosing every node of the topology, grown by `margin_m`.
BoundingBox scenario_bounds(const Topology& topo, double margin_m);

/// Path-loss grid of one transmitter. Node (row, col) sits at origin + (col, row) * cell.
struct TxGrid {
  Position origin;
  double cell_m = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<double> pathloss_db; // row-major

  double at(int row, int col) const { return pathloss_db[static_cast<std::size_t>(row) * cols + col]; }
  Position node(int row, int col) const {
    return {origin.x + col * cell_m, origin.y + row * cell_m};
  }
};

/// Gridded large-scale CSI map, one grid per transmitter.
struct GridMap {
  std::map<std::string, TxGrid> grids;
};

inline constexpr double kIdwPower = 2.0;
inline constexpr int kIdwNeighborhoodCells = 3;

/// Inverse-distance-weighted gridding. A node coinciding with samples takes their mean; nodes
/// with no sample within the neighborhood take the nearest sample.
GridMap build_grid_map(const CsiDataset& data, double cell_m);

/// Bilinear interpolation inside the grid; throws InvalidArgument outside it.
double query(const GridMap& map, const std::string& tx_id, Position rx);

void export_grid_csv(const TxGrid& grid, const std::filesystem::path& path);

/// L = alpha log10(d) + 20 log10(f_c [Hz]) + beta.
struct CurveFitModel {
  double alpha = 0.0; // dB/decade
  double beta = 0.0;  // dB
  double carrier_ghz = 2.8;
};

/// Least-squares fit of alpha and beta over every sample. `tx_positions` resolves tx_id.
CurveFitModel fit_curve_model(const CsiDataset& data, const std::map<std::string, Position>& tx_positions,
                              double carrier_ghz);

double query(const CurveFitModel& model, Position tx, Position rx);

class GridMapEstimator final : public PathlossEstimator {
public:
  explicit GridMapEstimator(GridMap map) : map_(std::move(map)) {}
  double pathloss_db(const Transmitter& tx, Position rx) const override;
  const GridMap& map() const { return map_; }

private:
  GridMap map_;
};

class CurveFitEstimator final : public PathlossEstimator {
public:
  explicit CurveFitEstimator(CurveFitModel model) : model_(model) {}
  double pathloss_db(const Transmitter& tx, Position rx) const override;
  const CurveFitModel& model() const { return model_; }

private:
  CurveFitModel model_;
};

/// Mean |estimate - ground truth| in dB over every (transmitter, probe) pair.
double map_error(const PathlossEstimator& estimator, const PropagationField& field,
                 std::span<const Transmitter> txs, std::span<const Position> probes);

} // namespace rmshare
