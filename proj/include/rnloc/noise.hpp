#pragma once

#include <string>
#include <vector>

#include "rnloc/geometry.hpp"
#include "rnloc/rng.hpp"

namespace rnloc {

enum class NoiseKind { Gaussian, Laplace, Cauchy };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Additive range-noise model. scale is the standard deviation for Gaussian
// and the scale parameter for Laplace/Cauchy; scale == 0 is the exact
// zero-noise limit (no draws are consumed). Laplace and Cauchy sample through
// the inverse CDF of one uniform draw.
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double scale_m = 0.0;

  double sample(Rng& rng) const;
};

// Hardware faults layered on top of the regular noise. outlier_node's
// incident measurements get an extra heavy-tailed draw when the fault coin
// comes up; miscalibrated_node scales its true distances by gain before any
// noise is added. Ids are 0-based; -1 disables the respective fault.
struct FaultSpec {
  int outlier_node = -1;
  double outlier_probability = 0.0;
  NoiseModel outlier_model{NoiseKind::Laplace, 0.0};
  int miscalibrated_node = -1;
  double gain = 1.0;
  // false: one coin per trial (default). true: an independent coin per measurement.
  bool per_measurement = false;

  void validate(int n) const;
};

// Sampled ranges, aligned index-for-index with topology.edges and
// topology.anchor_links of the instance they were drawn from.
struct Measurements {
  std::vector<double> edge_range_m;
  std::vector<double> link_range_m;
  bool outlier_active = false;  // per-trial fault coin (false in per-measurement mode)
};

// One Monte Carlo trial worth of ranges: d = |true distance * gain? + noise
// (+ outlier)|. Draw order is fixed (trial coin, then edges in storage order,
// then links; per measurement: coin, regular draw, outlier draw) so a given
// rng stream always yields the same measurements.
Measurements sample_measurements(const NetworkInstance& inst, const NoiseModel& regular,
                                 const FaultSpec& fault, Rng& rng);

// CSV round trip; rows are (type, i, j, range_m) with type in {edge, anchor}.
void save_measurements_csv(const NetworkTopology& topo, const Measurements& meas,
                           const std::string& path);
Measurements load_measurements_csv(const NetworkTopology& topo, const std::string& path);

}  // namespace rnloc
