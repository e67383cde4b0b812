#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rnloc {

// Undirected measurement graph of a sensor network: n sensors, m anchors,
// ambient dimension p (2 or 3). Sensor-sensor edges are stored once with
// a < b; anchor links pair a sensor with an anchor. All ids are 0-based.
struct NetworkTopology {
  int n = 0;
  int m = 0;
  int p = 2;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<int, int>> anchor_links;

  // Throws ConfigError when any structural invariant is violated
  // (id ranges, duplicate edges, self loops, p outside {2,3}).
  void validate() const;

  std::vector<int> degrees() const;
  std::vector<int> anchor_link_counts() const;
  int max_degree() const;
  int max_anchor_links() const;
  bool is_connected() const;
};

// Signed arc-node incidence matrix, |edges| x n. Row e of edge (a, b) with
// a < b carries +1 at a and -1 at b, so C * x stacks the differences x_a - x_b.
Eigen::SparseMatrix<double> incidence_matrix(const NetworkTopology& topo);

// A concrete deployment: topology plus ground-truth sensor and anchor
// coordinates, flattened in node-major order (node i occupies [i*p, i*p+p)).
struct NetworkInstance {
  NetworkTopology topology;
  Eigen::VectorXd positions;  // n*p, meters
  Eigen::VectorXd anchors;    // m*p, meters
  std::uint64_t seed = 0;

  Eigen::VectorXd sensor(int i) const { return positions.segment(i * topology.p, topology.p); }
  Eigen::VectorXd anchor(int k) const { return anchors.segment(k * topology.p, topology.p); }
  double edge_distance(int e) const;
  double link_distance(int l) const;
  void validate() const;
};

struct GeometryConfig {
  int n = 10;
  int m = 4;
  int p = 2;
  double side_m = 1000.0;
  double comm_radius_m = 500.0;
  int max_attempts = 1000;
};

// Draws sensors uniformly in the deployment cube and connects every pair
// (sensor-sensor and sensor-anchor) within comm_radius_m. Anchors sit at the
// cube corners when m == 2^p, otherwise they are drawn uniformly as well.
// Resamples until the sensor graph is connected and at least one anchor link
// exists; throws GenerationError after max_attempts failures.
NetworkInstance generate_geometric_network(const GeometryConfig& cfg, std::uint64_t seed);

// JSON round trip for instances (schema: p, n, m, positions, anchors, edges,
// anchor_links, seed).
std::string instance_to_json(const NetworkInstance& inst);
NetworkInstance instance_from_json(const std::string& text);
void save_instance(const NetworkInstance& inst, const std::string& path);
NetworkInstance load_instance(const std::string& path);

}  // namespace rnloc
