#include "rnloc/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rnloc/errors.hpp"
#include "rnloc/rng.hpp"

namespace rnloc {

void NetworkTopology::validate() const {
  if (p != 2 && p != 3) throw ConfigError("ambient dimension must be 2 or 3");
  if (n < 1) throw ConfigError("need at least one sensor");
  if (m < 0) throw ConfigError("negative anchor count");
  std::set<std::pair<int, int>> seen_edges;
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw ConfigError("edge endpoint out of range");
    if (a == b) throw ConfigError("self edge");
    if (a > b) throw ConfigError("edge endpoints not ordered a < b");
    if (!seen_edges.insert({a, b}).second) throw ConfigError("duplicate edge");
  }
  std::set<std::pair<int, int>> seen_links;
  for (const auto& [i, k] : anchor_links) {
    if (i < 0 || i >= n) throw ConfigError("anchor link sensor out of range");
    if (k < 0 || k >= m) throw ConfigError("anchor link anchor out of range");
    if (!seen_links.insert({i, k}).second) throw ConfigError("duplicate anchor link");
  }
}

std::vector<int> NetworkTopology::degrees() const {
  std::vector<int> deg(n, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

std::vector<int> NetworkTopology::anchor_link_counts() const {
  std::vector<int> cnt(n, 0);
  for (const auto& [i, k] : anchor_links) {
    (void)k;
    ++cnt[i];
  }
  return cnt;
}

int NetworkTopology::max_degree() const {
  const auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

int NetworkTopology::max_anchor_links() const {
  const auto cnt = anchor_link_counts();
  return cnt.empty() ? 0 : *std::max_element(cnt.begin(), cnt.end());
}

bool NetworkTopology::is_connected() const {
  if (n <= 1) return true;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

Eigen::SparseMatrix<double> incidence_matrix(const NetworkTopology& topo) {
  Eigen::SparseMatrix<double> C(static_cast<int>(topo.edges.size()), topo.n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * topo.edges.size());
  for (int e = 0; e < static_cast<int>(topo.edges.size()); ++e) {
    trips.emplace_back(e, topo.edges[e].first, 1.0);
    trips.emplace_back(e, topo.edges[e].second, -1.0);
  }
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

double NetworkInstance::edge_distance(int e) const {
  const auto& [a, b] = topology.edges[e];
  return (sensor(a) - sensor(b)).norm();
}

double NetworkInstance::link_distance(int l) const {
  const auto& [i, k] = topology.anchor_links[l];
  return (sensor(i) - anchor(k)).norm();
}

void NetworkInstance::validate() const {
  topology.validate();
  if (positions.size() != static_cast<long>(topology.n) * topology.p)
    throw ConfigError("positions size does not match n*p");
  if (anchors.size() != static_cast<long>(topology.m) * topology.p)
    throw ConfigError("anchors size does not match m*p");
}

namespace {

// Corner coordinates of the deployment cube in lexicographic bit order.
Eigen::VectorXd cube_corners(int m, int p, double side) {
  Eigen::VectorXd out(m * p);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < p; ++j) out[k * p + j] = ((k >> j) & 1) ? side : 0.0;
  return out;
}

}  // namespace

NetworkInstance generate_geometric_network(const GeometryConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 1 || cfg.m < 1) throw ConfigError("need at least one sensor and one anchor");
  if (cfg.p != 2 && cfg.p != 3) throw ConfigError("ambient dimension must be 2 or 3");
  if (cfg.comm_radius_m <= 0.0 || cfg.side_m <= 0.0)
    throw ConfigError("side and comm radius must be positive");

  Rng rng(seed);
  const bool corner_anchors = cfg.m == (1 << cfg.p);
  std::string last_failure = "no attempt made";

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    NetworkInstance inst;
    inst.seed = seed;
    inst.topology.n = cfg.n;
    inst.topology.m = cfg.m;
    inst.topology.p = cfg.p;
    inst.positions.resize(cfg.n * cfg.p);
    for (int i = 0; i < cfg.n * cfg.p; ++i) inst.positions[i] = rng.uniform(0.0, cfg.side_m);
    if (corner_anchors) {
      inst.anchors = cube_corners(cfg.m, cfg.p, cfg.side_m);
    } else {
      inst.anchors.resize(cfg.m * cfg.p);
      for (int i = 0; i < cfg.m * cfg.p; ++i) inst.anchors[i] = rng.uniform(0.0, cfg.side_m);
    }

    for (int a = 0; a < cfg.n; ++a)
      for (int b = a + 1; b < cfg.n; ++b)
        if ((inst.sensor(a) - inst.sensor(b)).norm() <= cfg.comm_radius_m)
          inst.topology.edges.emplace_back(a, b);
    for (int i = 0; i < cfg.n; ++i)
      for (int k = 0; k < cfg.m; ++k)
        if ((inst.sensor(i) - inst.anchor(k)).norm() <= cfg.comm_radius_m)
          inst.topology.anchor_links.emplace_back(i, k);

    if (!inst.topology.is_connected()) {
      last_failure = "sensor graph not connected";
      continue;
    }
    if (inst.topology.anchor_links.empty()) {
      last_failure = "no sensor within comm radius of any anchor";
      continue;
    }
    inst.validate();
    return inst;
  }
  throw GenerationError("network generation failed after " + std::to_string(cfg.max_attempts) +
                        " attempts: " + last_failure);
}

std::string instance_to_json(const NetworkInstance& inst) {
  nlohmann::json j;
  j["p"] = inst.topology.p;
  j["n"] = inst.topology.n;
  j["m"] = inst.topology.m;
  j["seed"] = inst.seed;
  auto flatten = [&](const Eigen::VectorXd& v, int count) {
    std::vector<std::vector<double>> rows;
    rows.reserve(count);
    for (int i = 0; i < count; ++i) {
      std::vector<double> row(inst.topology.p);
      for (int d = 0; d < inst.topology.p; ++d) row[d] = v[i * inst.topology.p + d];
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["positions"] = flatten(inst.positions, inst.topology.n);
  j["anchors"] = flatten(inst.anchors, inst.topology.m);
  j["edges"] = inst.topology.edges;
  j["anchor_links"] = inst.topology.anchor_links;
  return j.dump(2);
}

NetworkInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad instance json: ") + e.what());
  }
  NetworkInstance inst;
  try {
    inst.topology.p = j.at("p").get<int>();
    inst.topology.n = j.at("n").get<int>();
    inst.topology.m = j.at("m").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    const auto pos = j.at("positions").get<std::vector<std::vector<double>>>();
    const auto anc = j.at("anchors").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(pos.size()) != inst.topology.n ||
        static_cast<int>(anc.size()) != inst.topology.m)
      throw ConfigError("instance json: position/anchor counts disagree with n/m");
    inst.positions.resize(inst.topology.n * inst.topology.p);
    inst.anchors.resize(inst.topology.m * inst.topology.p);
    for (int i = 0; i < inst.topology.n; ++i) {
      if (static_cast<int>(pos[i].size()) != inst.topology.p)
        throw ConfigError("instance json: position row has wrong dimension");
      for (int d = 0; d < inst.topology.p; ++d) inst.positions[i * inst.topology.p + d] = pos[i][d];
    }
    for (int k = 0; k < inst.topology.m; ++k) {
      if (static_cast<int>(anc[k].size()) != inst.topology.p)
        throw ConfigError("instance json: anchor row has wrong dimension");
      for (int d = 0; d < inst.topology.p; ++d) inst.anchors[k * inst.topology.p + d] = anc[k][d];
    }
    inst.topology.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
    inst.topology.anchor_links = j.at("anchor_links").get<std::vector<std::pair<int, int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad instance json: ") + e.what());
  }
  inst.validate();
  return inst;
}

void save_instance(const NetworkInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << instance_to_json(inst) << '\n';
}

NetworkInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace rnloc
