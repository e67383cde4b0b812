#include "rnloc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rnloc/errors.hpp"

namespace rnloc {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Cauchy: return "cauchy";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "laplace") return NoiseKind::Laplace;
  if (name == "cauchy") return NoiseKind::Cauchy;
  throw ConfigError("unknown noise kind: " + name);
}

double NoiseModel::sample(Rng& rng) const {
  if (scale_m < 0.0) throw ConfigError("negative noise scale");
  if (scale_m == 0.0) return 0.0;
  switch (kind) {
    case NoiseKind::Gaussian:
      return scale_m * rng.gaussian();
    case NoiseKind::Laplace: {
      // inverse CDF of the standard Laplace, u centered on 0
      const double u = rng.uniform01() - 0.5;
      const double mag = -std::log(1.0 - 2.0 * std::abs(u));
      return scale_m * (u < 0.0 ? -mag : mag);
    }
    case NoiseKind::Cauchy: {
      // inverse CDF of the standard Cauchy
      const double u = rng.uniform01();
      return scale_m * std::tan(std::numbers::pi * (u - 0.5));
    }
  }
  return 0.0;
}

void FaultSpec::validate(int n) const {
  if (outlier_node >= n) throw ConfigError("outlier node id out of range");
  if (miscalibrated_node >= n) throw ConfigError("miscalibrated node id out of range");
  if (outlier_probability < 0.0 || outlier_probability > 1.0)
    throw ConfigError("outlier probability outside [0,1]");
  if (outlier_probability > 0.0 && outlier_node < 0)
    throw ConfigError("outlier probability set but no outlier node");
  if (gain <= 0.0) throw ConfigError("calibration gain must be positive");
}

Measurements sample_measurements(const NetworkInstance& inst, const NoiseModel& regular,
                                 const FaultSpec& fault, Rng& rng) {
  fault.validate(inst.topology.n);
  Measurements meas;
  meas.edge_range_m.reserve(inst.topology.edges.size());
  meas.link_range_m.reserve(inst.topology.anchor_links.size());

  const bool coin_enabled = fault.outlier_node >= 0 && fault.outlier_probability > 0.0;
  bool trial_coin = false;
  if (coin_enabled && !fault.per_measurement)
    trial_coin = rng.uniform01() < fault.outlier_probability;
  meas.outlier_active = trial_coin;

  auto draw_range = [&](double true_dist, int end_a, int end_b) {
    double base = true_dist;
    if (end_a == fault.miscalibrated_node || end_b == fault.miscalibrated_node)
      base *= fault.gain;
    bool corrupted = false;
    if (coin_enabled && (end_a == fault.outlier_node || end_b == fault.outlier_node)) {
      if (fault.per_measurement)
        corrupted = rng.uniform01() < fault.outlier_probability;
      else
        corrupted = trial_coin;
    }
    double v = base + regular.sample(rng);
    if (corrupted) v += fault.outlier_model.sample(rng);
    return std::abs(v);
  };

  for (std::size_t e = 0; e < inst.topology.edges.size(); ++e) {
    const auto& [a, b] = inst.topology.edges[e];
    meas.edge_range_m.push_back(draw_range(inst.edge_distance(static_cast<int>(e)), a, b));
  }
  for (std::size_t l = 0; l < inst.topology.anchor_links.size(); ++l) {
    const int i = inst.topology.anchor_links[l].first;
    meas.link_range_m.push_back(draw_range(inst.link_distance(static_cast<int>(l)), i, -2));
  }
  return meas;
}

void save_measurements_csv(const NetworkTopology& topo, const Measurements& meas,
                           const std::string& path) {
  if (meas.edge_range_m.size() != topo.edges.size() ||
      meas.link_range_m.size() != topo.anchor_links.size())
    throw ConfigError("measurements do not match topology");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "type,i,j,range_m\n";
  char buf[64];
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", meas.edge_range_m[e]);
    out << "edge," << topo.edges[e].first << ',' << topo.edges[e].second << ',' << buf << '\n';
  }
  for (std::size_t l = 0; l < topo.anchor_links.size(); ++l) {
    std::snprintf(buf, sizeof buf, "%.17g", meas.link_range_m[l]);
    out << "anchor," << topo.anchor_links[l].first << ',' << topo.anchor_links[l].second << ','
        << buf << '\n';
  }
}

Measurements load_measurements_csv(const NetworkTopology& topo, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measurements file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "type,i,j,range_m")
    throw ConfigError("bad measurements header in " + path);

  Measurements meas;
  meas.edge_range_m.assign(topo.edges.size(), -1.0);
  meas.link_range_m.assign(topo.anchor_links.size(), -1.0);
  std::size_t edges_seen = 0, links_seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string type, si, sj, sr;
    if (!std::getline(row, type, ',') || !std::getline(row, si, ',') ||
        !std::getline(row, sj, ',') || !std::getline(row, sr, ','))
      throw ConfigError("bad measurements row: " + line);
    const int i = std::stoi(si);
    const int j = std::stoi(sj);
    const double r = std::stod(sr);
    if (type == "edge") {
      const auto it = std::find(topo.edges.begin(), topo.edges.end(), std::make_pair(i, j));
      if (it == topo.edges.end()) throw ConfigError("measurement for unknown edge: " + line);
      const auto idx = static_cast<std::size_t>(it - topo.edges.begin());
      if (meas.edge_range_m[idx] >= 0.0) throw ConfigError("duplicate edge measurement: " + line);
      meas.edge_range_m[idx] = r;
      ++edges_seen;
    } else if (type == "anchor") {
      const auto it =
          std::find(topo.anchor_links.begin(), topo.anchor_links.end(), std::make_pair(i, j));
      if (it == topo.anchor_links.end())
        throw ConfigError("measurement for unknown anchor link: " + line);
      const auto idx = static_cast<std::size_t>(it - topo.anchor_links.begin());
      if (meas.link_range_m[idx] >= 0.0) throw ConfigError("duplicate link measurement: " + line);
      meas.link_range_m[idx] = r;
      ++links_seen;
    } else {
      throw ConfigError("bad measurement type: " + type);
    }
  }
  if (edges_seen != topo.edges.size() || links_seen != topo.anchor_links.size())
    throw ConfigError("measurement file does not cover the topology");
  return meas;
}

}  // namespace rnloc
