#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <doctest.h>

#include "rnloc/errors.hpp"
#include "rnloc/geometry.hpp"
#include "rnloc/noise.hpp"

using namespace rnloc;

namespace {

NetworkInstance test_instance() {
  GeometryConfig cfg;
  return generate_geometric_network(cfg, 51);
}

}  // namespace

TEST_CASE("noise kind strings round trip") {
  for (NoiseKind k : {NoiseKind::Gaussian, NoiseKind::Laplace, NoiseKind::Cauchy})
    CHECK(noise_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(noise_kind_from_string("uniform"), ConfigError);
}

TEST_CASE("zero scale sampling is exact and draw-free") {
  Rng a(9), b(9);
  NoiseModel silent{NoiseKind::Gaussian, 0.0};
  CHECK(silent.sample(a) == 0.0);
  // the rng was not advanced
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("laplace and gaussian sample moments match their scales") {
  Rng rng(17);
  const int n = 200000;

  NoiseModel gauss{NoiseKind::Gaussian, 3.0};
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = gauss.sample(rng);
    sum += v;
    sumsq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(sumsq / n == doctest::Approx(9.0).epsilon(0.03));

  NoiseModel lap{NoiseKind::Laplace, 2.0};
  sum = sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = lap.sample(rng);
    sum += v;
    sumsq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.05);
  // Laplace variance is 2 b^2
  CHECK(sumsq / n == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("cauchy quartiles sit at plus and minus the scale") {
  Rng rng(23);
  NoiseModel cauchy{NoiseKind::Cauchy, 5.0};
  std::vector<double> draws(100001);
  for (double& d : draws) d = cauchy.sample(rng);
  std::sort(draws.begin(), draws.end());
  CHECK(std::abs(draws[draws.size() / 2]) < 0.2);
  CHECK(draws[draws.size() / 4] == doctest::Approx(-5.0).epsilon(0.1));
  CHECK(draws[3 * draws.size() / 4] == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("negative scale is rejected") {
  Rng rng(1);
  NoiseModel bad{NoiseKind::Gaussian, -1.0};
  CHECK_THROWS_AS(bad.sample(rng), ConfigError);
}

TEST_CASE("measurement sampling is deterministic and noise-free at scale zero") {
  NetworkInstance inst = test_instance();
  Rng r1(77), r2(77);
  NoiseModel reg{NoiseKind::Gaussian, 40.0};
  Measurements a = sample_measurements(inst, reg, FaultSpec{}, r1);
  Measurements b = sample_measurements(inst, reg, FaultSpec{}, r2);
  CHECK(a.edge_range_m == b.edge_range_m);
  CHECK(a.link_range_m == b.link_range_m);

  Rng r3(77);
  Measurements clean = sample_measurements(inst, NoiseModel{NoiseKind::Gaussian, 0.0},
                                           FaultSpec{}, r3);
  for (std::size_t e = 0; e < clean.edge_range_m.size(); ++e)
    CHECK(clean.edge_range_m[e] == doctest::Approx(inst.edge_distance((int)e)).epsilon(1e-15));
  for (std::size_t l = 0; l < clean.link_range_m.size(); ++l)
    CHECK(clean.link_range_m[l] == doctest::Approx(inst.link_distance((int)l)).epsilon(1e-15));
}

TEST_CASE("measured ranges are folded to be nonnegative") {
  NetworkInstance inst = test_instance();
  Rng rng(5);
  // noise far larger than any distance forces sign flips that folding absorbs
  NoiseModel wild{NoiseKind::Gaussian, 1e6};
  Measurements meas = sample_measurements(inst, wild, FaultSpec{}, rng);
  for (double r : meas.edge_range_m) CHECK(r >= 0.0);
  for (double r : meas.link_range_m) CHECK(r >= 0.0);
}

TEST_CASE("trial-level outlier gate corrupts all of the node's measurements or none") {
  NetworkInstance inst = test_instance();
  FaultSpec fault;
  fault.outlier_node = 3;
  fault.outlier_probability = 0.5;
  fault.outlier_model = NoiseModel{NoiseKind::Laplace, 4000.0};
  NoiseModel reg{NoiseKind::Gaussian, 1.0};

  int active = 0, total = 200;
  for (int t = 0; t < total; ++t) {
    Rng rng(1000 + t);
    Measurements meas = sample_measurements(inst, reg, fault, rng);
    double node_max_dev = 0.0, other_max_dev = 0.0;
    for (std::size_t e = 0; e < inst.topology.edges.size(); ++e) {
      const auto& [a, b] = inst.topology.edges[e];
      const double dev = std::abs(meas.edge_range_m[e] - inst.edge_distance((int)e));
      if (a == fault.outlier_node || b == fault.outlier_node)
        node_max_dev = std::max(node_max_dev, dev);
      else
        other_max_dev = std::max(other_max_dev, dev);
    }
    if (meas.outlier_active) {
      ++active;
      // with several measurements and a 4 km Laplace, at least one sticks out
      CHECK(node_max_dev > 100.0);
    } else {
      // regular noise is 1 m, so nothing should deviate much
      CHECK(node_max_dev < 50.0);
    }
    CHECK(other_max_dev < 50.0);
  }
  // the gate is a fair-ish coin at p = 0.5
  CHECK(active > 60);
  CHECK(active < 140);
}

TEST_CASE("probability zero means the gate never fires and draws nothing") {
  NetworkInstance inst = test_instance();
  NoiseModel reg{NoiseKind::Gaussian, 40.0};
  FaultSpec gated;
  gated.outlier_node = 3;
  gated.outlier_probability = 0.0;
  Rng r1(4), r2(4);
  Measurements with_node = sample_measurements(inst, reg, gated, r1);
  Measurements no_fault = sample_measurements(inst, reg, FaultSpec{}, r2);
  CHECK(with_node.outlier_active == false);
  CHECK(with_node.edge_range_m == no_fault.edge_range_m);
  CHECK(with_node.link_range_m == no_fault.link_range_m);
}

TEST_CASE("miscalibration scales the true distance before noise") {
  NetworkInstance inst = test_instance();
  FaultSpec fault;
  fault.miscalibrated_node = 2;
  fault.gain = 0.2;
  Rng rng(6);
  Measurements meas = sample_measurements(inst, NoiseModel{NoiseKind::Gaussian, 0.0}, fault, rng);
  for (std::size_t e = 0; e < inst.topology.edges.size(); ++e) {
    const auto& [a, b] = inst.topology.edges[e];
    const double want =
        (a == 2 || b == 2) ? 0.2 * inst.edge_distance((int)e) : inst.edge_distance((int)e);
    CHECK(meas.edge_range_m[e] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("per-measurement gating corrupts measurements independently") {
  NetworkInstance inst = test_instance();
  FaultSpec fault;
  fault.outlier_node = 0;
  fault.outlier_probability = 0.5;
  fault.per_measurement = true;
  fault.outlier_model = NoiseModel{NoiseKind::Laplace, 1e5};
  NoiseModel reg{NoiseKind::Gaussian, 1.0};

  // across trials, some of node 0's measurements should be corrupted while
  // others in the same trial are not
  bool saw_mixed = false;
  for (int t = 0; t < 50 && !saw_mixed; ++t) {
    Rng rng(300 + t);
    Measurements meas = sample_measurements(inst, reg, fault, rng);
    int big = 0, small = 0;
    for (std::size_t e = 0; e < inst.topology.edges.size(); ++e) {
      const auto& [a, b] = inst.topology.edges[e];
      if (a != 0 && b != 0) continue;
      (std::abs(meas.edge_range_m[e] - inst.edge_distance((int)e)) > 100.0 ? big : small)++;
    }
    saw_mixed = big > 0 && small > 0;
  }
  CHECK(saw_mixed);
}

TEST_CASE("fault validation catches bad specs") {
  FaultSpec fault;
  fault.outlier_node = 12;
  CHECK_THROWS_AS(fault.validate(10), ConfigError);
  fault.outlier_node = -1;
  fault.outlier_probability = 0.3;
  CHECK_THROWS_AS(fault.validate(10), ConfigError);
  fault = FaultSpec{};
  fault.gain = 0.0;
  CHECK_THROWS_AS(fault.validate(10), ConfigError);
  fault = FaultSpec{};
  fault.outlier_probability = 1.5;
  fault.outlier_node = 0;
  CHECK_THROWS_AS(fault.validate(10), ConfigError);
}

TEST_CASE("measurements csv round trips bit for bit") {
  NetworkInstance inst = test_instance();
  Rng rng(8);
  Measurements meas =
      sample_measurements(inst, NoiseModel{NoiseKind::Gaussian, 40.0}, FaultSpec{}, rng);
  const std::string path = "/tmp/rnloc_test_meas.csv";
  save_measurements_csv(inst.topology, meas, path);
  Measurements back = load_measurements_csv(inst.topology, path);
  CHECK(back.edge_range_m == meas.edge_range_m);
  CHECK(back.link_range_m == meas.link_range_m);
  std::remove(path.c_str());
}
