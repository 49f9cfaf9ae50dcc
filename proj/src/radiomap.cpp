// SPDX-License-Identifier: Apache-2.0
#include "rmshare/radiomap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rmshare/errors.hpp"

namespace rmshare {

namespace {

constexpr const char* kDatasetHeader = "tx_id,x_m,y_m,pathloss_db";

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, const std::string& where) {
  const std::string t = trim(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InvalidArgument(where + ": '" + t + "' is not a number");
  }
  if (used != t.size() || !std::isfinite(v)) throw InvalidArgument(where + ": '" + t + "' is not a number");
  return v;
}

double idw_weight(double d) { return 1.0 / std::pow(d, kIdwPower); }

TxGrid grid_for(const std::vector<const CsiSample*>& samples, double cell_m) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const CsiSample* s : samples) {
    x0 = std::min(x0, s->rx.x);
    y0 = std::min(y0, s->rx.y);
    x1 = std::max(x1, s->rx.x);
    y1 = std::max(y1, s->rx.y);
  }
  TxGrid g;
  g.origin = {x0, y0};
  g.cell_m = cell_m;
  // Small relative slack so a lattice that spans the box exactly does not gain a spurious column.
  g.cols = static_cast<int>(std::ceil((x1 - x0) / cell_m - 1e-9)) + 1;
  g.rows = static_cast<int>(std::ceil((y1 - y0) / cell_m - 1e-9)) + 1;
  g.pathloss_db.assign(static_cast<std::size_t>(g.rows) * g.cols, 0.0);

  // Bucket samples by nearest node so each node only visits its neighbourhood.
  auto key = [&](int r, int c) { return static_cast<long long>(r) * (g.cols + 1) + c; };
  std::unordered_map<long long, std::vector<const CsiSample*>> buckets;
  for (const CsiSample* s : samples) {
    const int c = static_cast<int>(std::lround((s->rx.x - x0) / cell_m));
    const int r = static_cast<int>(std::lround((s->rx.y - y0) / cell_m));
    buckets[key(r, c)].push_back(s);
  }

  const double coincide = 1e-9 * cell_m;
  const double radius = kIdwNeighborhoodCells * cell_m;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const Position node = g.node(r, c);
      double exact_sum = 0.0, wsum = 0.0, vsum = 0.0;
      int exact_n = 0;
      for (int dr = -kIdwNeighborhoodCells - 1; dr <= kIdwNeighborhoodCells + 1; ++dr) {
        for (int dc = -kIdwNeighborhoodCells - 1; dc <= kIdwNeighborhoodCells + 1; ++dc) {
          const int br = r + dr, bc = c + dc;
          if (br < 0 || bc < 0 || br >= g.rows || bc >= g.cols) continue;
          const auto it = buckets.find(key(br, bc));
          if (it == buckets.end()) continue;
          for (const CsiSample* s : it->second) {
            const double d = distance(node, s->rx);
            if (d <= coincide) {
              exact_sum += s->pathloss_db;
              ++exact_n;
            } else if (d <= radius) {
              const double w = idw_weight(d);
              wsum += w;
              vsum += w * s->pathloss_db;
            }
          }
        }
      }
      double value = 0.0;
      if (exact_n > 0) {
        value = exact_sum / exact_n;
      } else if (wsum > 0.0) {
        value = vsum / wsum;
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (const CsiSample* s : samples) {
          const double d = distance(node, s->rx);
          if (d < best) {
            best = d;
            value = s->pathloss_db;
          }
        }
      }
      g.pathloss_db[static_cast<std::size_t>(r) * g.cols + c] = value;
    }
  }
  return g;
}

} // namespace

std::vector<std::string> CsiDataset::tx_ids() const {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.tx_id);
  return {ids.begin(), ids.end()};
}

CsiDataset parse_dataset(std::istream& in, const std::string& source_name) {
  CsiDataset data;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (t != kDatasetHeader) throw InvalidArgument(where + ": expected header '" + kDatasetHeader + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4) throw InvalidArgument(where + ": expected 4 fields, got " + std::to_string(fields.size()));
    CsiSample s;
    s.tx_id = trim(fields[0]);
    if (s.tx_id.empty()) throw InvalidArgument(where + ": empty tx_id");
    s.rx = {parse_number(fields[1], where), parse_number(fields[2], where)};
    s.pathloss_db = parse_number(fields[3], where);
    data.samples.push_back(std::move(s));
  }
  if (!header_seen) throw InvalidArgument(source_name + ": empty dataset file");
  return data;
}

CsiDataset ingest_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset " + path.string());
  return parse_dataset(in, path.string());
}

void write_dataset(const CsiDataset& data, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os.precision(12);
  os << kDatasetHeader << '\n';
  for (const auto& s : data.samples) os << s.tx_id << ',' << s.rx.x << ',' << s.rx.y << ',' << s.pathloss_db << '\n';
}

CsiDataset sample_field(const PropagationField& field, std::span<const Transmitter> txs, const BoundingBox& box,
                        double spacing_m) {
  if (!(spacing_m > 0.0)) throw InvalidArgument("sample_field: spacing must be positive");
  if (!(box.x_max >= box.x_min && box.y_max >= box.y_min)) throw InvalidArgument("sample_field: empty box");
  const int nx = static_cast<int>(std::floor((box.x_max - box.x_min) / spacing_m + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((box.y_max - box.y_min) / spacing_m + 1e-9)) + 1;
  CsiDataset data;
  data.samples.reserve(txs.size() * static_cast<std::size_t>(nx) * ny);
  for (const Transmitter& tx : txs) {
    for (int r = 0; r < ny; ++r) {
      for (int c = 0; c < nx; ++c) {
        const Position rx{box.x_min + c * spacing_m, box.y_min + r * spacing_m};
        // A receiver on top of the transmitter has no defined path loss; use the 1 m reference.
        const double d = distance(tx.position, rx);
        const double pl = d > 0.0 ? ground_truth_pathloss(field, tx.position, rx) : field.reference_loss_db;
        data.samples.push_back({tx.id, rx, pl});
      }
    }
  }
  return data;
}

BoundingBox scenario_bounds(const Topology& topo, double margin_m) {
  BoundingBox b{topo.user_position.x, topo.user_position.y, topo.user_position.x, topo.user_position.y};
  auto grow = [&](Position p) {
    b.x_min = std::min(b.x_min, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.x_max = std::max(b.x_max, p.x);
    b.y_max = std::max(b.y_max, p.y);
  };
  grow(topo.target_position);
  for (Position p : topo.bs_positions) grow(p);
  for (Position p : topo.radar_positions) grow(p);
  b.x_min -= margin_m;
  b.y_min -= margin_m;
  b.x_max += margin_m;
  b.y_max += margin_m;
  return b;
}

GridMap build_grid_map(const CsiDataset& data, double cell_m) {
  if (!(cell_m > 0.0)) throw InvalidArgument("build_grid_map: cell size must be positive");
  if (data.samples.empty()) throw InvalidArgument("build_grid_map: empty dataset");
  std::map<std::string, std::vector<const CsiSample*>> by_tx;
  for (const auto& s : data.samples) by_tx[s.tx_id].push_back(&s);
  GridMap map;
  for (const auto& [id, samples] : by_tx) map.grids.emplace(id, grid_for(samples, cell_m));
  return map;
}

double query(const GridMap& map, const std::string& tx_id, Position rx) {
  const auto it = map.grids.find(tx_id);
  if (it == map.grids.end()) throw InvalidArgument("grid map has no transmitter '" + tx_id + "'");
  const TxGrid& g = it->second;
  const double fx = (rx.x - g.origin.x) / g.cell_m;
  const double fy = (rx.y - g.origin.y) / g.cell_m;
  constexpr double slack = 1e-9;
  if (fx < -slack || fy < -slack || fx > g.cols - 1 + slack || fy > g.rows - 1 + slack) {
    std::ostringstream os;
    os << "query outside the map of " << tx_id << ": (" << rx.x << ", " << rx.y << ")";
    throw InvalidArgument(os.str());
  }
  const double cx = std::clamp(fx, 0.0, static_cast<double>(g.cols - 1));
  const double cy = std::clamp(fy, 0.0, static_cast<double>(g.rows - 1));
  const int c0 = std::min(static_cast<int>(std::floor(cx)), std::max(g.cols - 2, 0));
  const int r0 = std::min(static_cast<int>(std::floor(cy)), std::max(g.rows - 2, 0));
  const int c1 = std::min(c0 + 1, g.cols - 1);
  const int r1 = std::min(r0 + 1, g.rows - 1);
  const double u = cx - c0, v = cy - r0;
  return (1 - u) * (1 - v) * g.at(r0, c0) + u * (1 - v) * g.at(r0, c1) + (1 - u) * v * g.at(r1, c0) +
         u * v * g.at(r1, c1);
}

void export_grid_csv(const TxGrid& grid, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os.precision(10);
  os << "row,col,pathloss_db\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) os << r << ',' << c << ',' << grid.at(r, c) << '\n';
  }
}

CurveFitModel fit_curve_model(const CsiDataset& data, const std::map<std::string, Position>& tx_positions,
                              double carrier_ghz) {
  if (!(carrier_ghz > 0.0)) throw InvalidArgument("fit_curve_model: carrier must be positive");
  const double freq_term = 20.0 * std::log10(carrier_ghz * 1e9);
  // Centred sums keep the 2x2 normal equations well conditioned.
  std::vector<double> xs, ys;
  xs.reserve(data.size());
  ys.reserve(data.size());
  for (const auto& s : data.samples) {
    const auto it = tx_positions.find(s.tx_id);
    if (it == tx_positions.end()) throw InvalidArgument("fit_curve_model: unknown transmitter '" + s.tx_id + "'");
    const double d = distance(it->second, s.rx);
    if (!(d > 0.0)) continue;
    xs.push_back(std::log10(std::max(d, 1.0)));
    ys.push_back(s.pathloss_db - freq_term);
  }
  if (xs.size() < 2) throw InvalidArgument("fit_curve_model: need at least two samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 1e-12 * static_cast<double>(xs.size()))) {
    throw InvalidArgument("fit_curve_model: rank deficient (all samples at one distance)");
  }
  CurveFitModel m;
  m.alpha = sxy / sxx;
  m.beta = my - m.alpha * mx;
  m.carrier_ghz = carrier_ghz;
  return m;
}

double query(const CurveFitModel& model, Position tx, Position rx) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) throw InvalidArgument("curve-fit query: transmitter and receiver coincide");
  return model.alpha * std::log10(std::max(d, 1.0)) + 20.0 * std::log10(model.carrier_ghz * 1e9) + model.beta;
}

double GridMapEstimator::pathloss_db(const Transmitter& tx, Position rx) const { return query(map_, tx.id, rx); }

double CurveFitEstimator::pathloss_db(const Transmitter& tx, Position rx) const {
  return query(model_, tx.position, rx);
}

double map_error(const PathlossEstimator& estimator, const PropagationField& field, std::span<const Transmitter> txs,
                 std::span<const Position> probes) {
  if (probes.empty() || txs.empty()) throw InvalidArgument("map_error: need transmitters and probes");
  double sum = 0.0;
  std::size_t n = 0;
  for (const Transmitter& tx : txs) {
    for (Position p : probes) {
      if (distance(tx.position, p) <= 0.0) continue;
      sum += std::abs(estimator.pathloss_db(tx, p) - ground_truth_pathloss(field, tx.position, p));
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("map_error: every probe coincides with a transmitter");
  return sum / static_cast<double>(n);
}

} // namespace rmshare
