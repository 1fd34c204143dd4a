#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regimescope/point_cloud.hpp"

namespace regimescope::sim {

enum class ForceMode { naive, cell_list };

// First-order stochastic particle model on a periodic square box:
//   r_i[n+1] = r_i[n] + dt * (beta * P_i[n] + alpha * sum_j F(r_j - r_i))
// with run-and-tumble propulsion P (heading redrawn every tumble_period steps,
// staggered per particle) and a soft-core pairwise force cut off at l_max.
struct SimConfig {
  std::size_t num_particles = 200;
  double box_side = 20.0;
  double dt = 0.02;
  std::size_t num_steps = 50000;
  double alpha = 0.09;
  double beta = 0.021;
  double l_attract = 0.5;
  double l_repel = 14.0;
  double l_max = 1.5;
  std::size_t tumble_period = 2500;
  std::uint64_t seed = 0;
  std::size_t snapshot_stride = 50;
  ForceMode force_mode = ForceMode::naive;

  void validate() const;  // throws ConfigError naming the offending field
};

struct ParticleState {
  std::vector<Vec2> positions;       // wrapped into [0, L)^2
  std::vector<double> heading_angles;  // [0, 2*pi)
  std::vector<std::size_t> tumble_offsets;  // [0, tumble_period)
};

struct Snapshot {
  std::size_t time_index = 0;
  PointCloud positions;
  std::vector<bool> interacting;  // ||sum_j F(r_j - r_i)|| > 0
};

// Scalar part of the pairwise force. Positive = repulsion; zero crossing at
// core_radius(l_attract, l_repel); callers apply the cutoff at l_max.
double force_bracket(double r, double l_attract, double l_repel);

// Distance at which the pairwise force changes sign:
//   L0 = l_attract * l_repel / (l_attract - l_repel) * ln(4 * l_attract / l_repel)
double core_radius(double l_attract, double l_repel);

// Force exerted on particle i by particle j, where displacement = r_j - r_i is
// already the minimum-image vector. Zero beyond l_max and at zero distance.
Vec2 pairwise_force(Vec2 displacement, const SimConfig& cfg);

// Net force on every particle. Naive mode is the O(K^2) pair loop; cell_list
// bins particles into cells of size >= l_max (falls back to naive when the box
// is too small for a 3x3 stencil). Both accumulate each pair once and apply
// the reaction with flipped sign, so Newton's third law holds exactly.
std::vector<Vec2> net_forces(const std::vector<Vec2>& positions, const SimConfig& cfg,
                             ForceMode mode);

ParticleState random_initial_state(const SimConfig& cfg);

// Advances one step: headings of particles due to tumble at step_index are
// redrawn first, then positions move under the forces evaluated at the current
// positions and are wrapped back into the box.
ParticleState step(const ParticleState& state, std::size_t step_index, const SimConfig& cfg);

bool is_tumble_step(std::size_t step_index, std::size_t tumble_offset, std::size_t tumble_period);

// Runs the model for cfg.num_steps steps, recording a snapshot every
// snapshot_stride steps plus the final step. Deterministic given cfg.seed.
std::vector<Snapshot> run_simulation(const SimConfig& cfg,
                                     const std::optional<ParticleState>& initial = std::nullopt);

enum class Regime { clustered, disordered, branched_clustered };

// Approximate parameter-range labels for the final configuration.
Regime regime_label(double alpha, double beta);
const char* regime_name(Regime regime);

}  // namespace regimescope::sim
