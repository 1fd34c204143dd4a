#include "regimescope/sim.hpp"

#include <cmath>

#include "regimescope/common.hpp"

namespace regimescope::sim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// RNG stream tags; every particle draws from its own streams so results do not
// depend on update order.
constexpr std::uint64_t kStreamInitPos = 0;
constexpr std::uint64_t kStreamInitHeading = 1;
constexpr std::uint64_t kStreamTumbleOffset = 2;
constexpr std::uint64_t kStreamTumbleAngle = 3;

// Counter-based draw: value n of the splitmix64 sequence starting at state s.
double counter_uniform(std::uint64_t stream_seed, std::uint64_t counter) {
  const std::uint64_t state = stream_seed + counter * 0x9e3779b97f4a7c15ULL;
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double wrap(double x, double side) {
  double w = x - side * std::floor(x / side);
  if (w >= side) w = 0.0;  // guards x = -tiny rounding up to side
  return w;
}

}  // namespace

void SimConfig::validate() const {
  if (num_particles == 0) throw ConfigError("num_particles must be >= 1");
  if (!(box_side > 0.0)) throw ConfigError("box_side must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(l_attract > 0.0)) throw ConfigError("l_attract must be > 0");
  if (!(l_repel > 0.0)) throw ConfigError("l_repel must be > 0");
  if (!(l_max > 0.0)) throw ConfigError("l_max must be > 0");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (tumble_period == 0) throw ConfigError("tumble_period must be >= 1");
  if (snapshot_stride == 0) throw ConfigError("snapshot_stride must be >= 1");
}

double force_bracket(double r, double l_attract, double l_repel) {
  return std::exp(-r / l_attract) / (4.0 * l_attract) - std::exp(-r / l_repel) / l_repel;
}

double core_radius(double l_attract, double l_repel) {
  if (!(l_attract > 0.0) || !(l_repel > 0.0))
    throw ConfigError("core_radius: interaction lengths must be > 0");
  if (l_attract == l_repel)
    throw ConfigError("core_radius: l_attract and l_repel must differ");
  const double r =
      l_attract * l_repel / (l_attract - l_repel) * std::log(4.0 * l_attract / l_repel);
  if (!(r > 0.0))
    throw ConfigError("core_radius: parameters give a non-positive core radius");
  return r;
}

Vec2 pairwise_force(Vec2 displacement, const SimConfig& cfg) {
  const double r2 = displacement.norm2();
  if (r2 == 0.0 || r2 > cfg.l_max * cfg.l_max) return {0.0, 0.0};
  const double r = std::sqrt(r2);
  const double b = force_bracket(r, cfg.l_attract, cfg.l_repel);
  // Positive bracket repels: push i away from j, i.e. along -displacement.
  const double s = -b / r;
  return {displacement.x * s, displacement.y * s};
}

namespace {

void accumulate_pair(std::vector<Vec2>& forces, const std::vector<Vec2>& pos, std::size_t i,
                     std::size_t j, const SimConfig& cfg) {
  const Vec2 v = min_image(pos[j] - pos[i], cfg.box_side);
  const Vec2 f = pairwise_force(v, cfg);
  forces[i] += f;
  forces[j] -= f;
}

void forces_naive(std::vector<Vec2>& forces, const std::vector<Vec2>& pos, const SimConfig& cfg) {
  const std::size_t n = pos.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) accumulate_pair(forces, pos, i, j, cfg);
}

void forces_cells(std::vector<Vec2>& forces, const std::vector<Vec2>& pos, const SimConfig& cfg) {
  const auto nc = static_cast<std::size_t>(std::floor(cfg.box_side / cfg.l_max));
  if (nc < 3) {
    forces_naive(forces, pos, cfg);
    return;
  }
  const double cell_size = cfg.box_side / static_cast<double>(nc);
  std::vector<std::vector<std::uint32_t>> cells(nc * nc);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    auto cx = static_cast<std::size_t>(pos[i].x / cell_size);
    auto cy = static_cast<std::size_t>(pos[i].y / cell_size);
    if (cx >= nc) cx = nc - 1;
    if (cy >= nc) cy = nc - 1;
    cells[cy * nc + cx].push_back(static_cast<std::uint32_t>(i));
  }
  // Half stencil so each pair is visited exactly once.
  constexpr int kOffsets[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  for (std::size_t cy = 0; cy < nc; ++cy) {
    for (std::size_t cx = 0; cx < nc; ++cx) {
      const auto& cell = cells[cy * nc + cx];
      for (std::size_t a = 0; a < cell.size(); ++a)
        for (std::size_t b = a + 1; b < cell.size(); ++b)
          accumulate_pair(forces, pos, cell[a], cell[b], cfg);
      for (const auto& off : kOffsets) {
        const int inc = static_cast<int>(nc);
        const auto ox = static_cast<std::size_t>((static_cast<int>(cx) + off[0] + inc) % inc);
        const auto oy = static_cast<std::size_t>((static_cast<int>(cy) + off[1]) % inc);
        const auto& other = cells[oy * nc + ox];
        for (std::uint32_t i : cell)
          for (std::uint32_t j : other) accumulate_pair(forces, pos, i, j, cfg);
      }
    }
  }
}

}  // namespace

std::vector<Vec2> net_forces(const std::vector<Vec2>& positions, const SimConfig& cfg,
                             ForceMode mode) {
  std::vector<Vec2> forces(positions.size(), Vec2{0.0, 0.0});
  if (mode == ForceMode::cell_list)
    forces_cells(forces, positions, cfg);
  else
    forces_naive(forces, positions, cfg);
  return forces;
}

ParticleState random_initial_state(const SimConfig& cfg) {
  cfg.validate();
  ParticleState st;
  const std::size_t k = cfg.num_particles;
  st.positions.reserve(k);
  st.heading_angles.reserve(k);
  st.tumble_offsets.reserve(k);
  Rng pos_rng(derive_seed(cfg.seed, kStreamInitPos));
  for (std::size_t i = 0; i < k; ++i) {
    const double x = pos_rng.uniform(0.0, cfg.box_side);
    const double y = pos_rng.uniform(0.0, cfg.box_side);
    st.positions.push_back({x, y});
  }
  for (std::size_t i = 0; i < k; ++i) {
    Rng heading_rng(derive_seed(cfg.seed, kStreamInitHeading, i));
    st.heading_angles.push_back(heading_rng.uniform(0.0, kTwoPi));
  }
  for (std::size_t i = 0; i < k; ++i) {
    Rng offset_rng(derive_seed(cfg.seed, kStreamTumbleOffset, i));
    st.tumble_offsets.push_back(static_cast<std::size_t>(offset_rng.uniform_int(cfg.tumble_period)));
  }
  return st;
}

bool is_tumble_step(std::size_t step_index, std::size_t tumble_offset,
                    std::size_t tumble_period) {
  return step_index % tumble_period == tumble_offset % tumble_period;
}

namespace {

void step_in_place(ParticleState& st, std::size_t step_index, const SimConfig& cfg,
                   const std::vector<Vec2>& forces) {
  const std::size_t k = st.positions.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (is_tumble_step(step_index, st.tumble_offsets[i], cfg.tumble_period)) {
      const double u = counter_uniform(derive_seed(cfg.seed, kStreamTumbleAngle, i), step_index);
      st.heading_angles[i] = u * kTwoPi;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2 heading{std::cos(st.heading_angles[i]), std::sin(st.heading_angles[i])};
    const Vec2 vel = heading * cfg.beta + forces[i] * cfg.alpha;
    st.positions[i] += vel * cfg.dt;
    st.positions[i] = {wrap(st.positions[i].x, cfg.box_side), wrap(st.positions[i].y, cfg.box_side)};
  }
}

Snapshot make_snapshot(std::size_t time_index, const ParticleState& st,
                       const std::vector<Vec2>& forces, const SimConfig& cfg) {
  Snapshot snap;
  snap.time_index = time_index;
  snap.positions.points = st.positions;
  snap.positions.domain = Domain{cfg.box_side, true};
  snap.interacting.resize(st.positions.size());
  for (std::size_t i = 0; i < st.positions.size(); ++i)
    snap.interacting[i] = forces[i].norm2() > 0.0;
  return snap;
}

}  // namespace

ParticleState step(const ParticleState& state, std::size_t step_index, const SimConfig& cfg) {
  cfg.validate();
  ParticleState next = state;
  const auto forces = net_forces(state.positions, cfg, cfg.force_mode);
  step_in_place(next, step_index, cfg, forces);
  return next;
}

std::vector<Snapshot> run_simulation(const SimConfig& cfg,
                                     const std::optional<ParticleState>& initial) {
  cfg.validate();
  ParticleState st = initial ? *initial : random_initial_state(cfg);
  if (st.positions.size() != cfg.num_particles ||
      st.heading_angles.size() != cfg.num_particles ||
      st.tumble_offsets.size() != cfg.num_particles)
    throw std::invalid_argument("run_simulation: initial state does not match num_particles");

  std::vector<Snapshot> snapshots;
  snapshots.reserve(cfg.num_steps / cfg.snapshot_stride + 2);
  for (std::size_t n = 0; n < cfg.num_steps; ++n) {
    const auto forces = net_forces(st.positions, cfg, cfg.force_mode);
    if (n % cfg.snapshot_stride == 0) snapshots.push_back(make_snapshot(n, st, forces, cfg));
    step_in_place(st, n, cfg, forces);
  }
  const auto forces = net_forces(st.positions, cfg, cfg.force_mode);
  snapshots.push_back(make_snapshot(cfg.num_steps, st, forces, cfg));
  return snapshots;
}

Regime regime_label(double alpha, double beta) {
  const bool beta_low = beta >= 0.009 && beta <= 0.012;
  const bool beta_high = beta >= 0.021 && beta <= 0.024;
  const bool alpha_low = alpha >= 0.09 && alpha <= 0.12;
  const bool alpha_high = alpha >= 0.21 && alpha <= 0.24;
  if (beta_low && alpha_high) return Regime::clustered;
  if (beta_high && alpha_low) return Regime::disordered;
  return Regime::branched_clustered;
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::clustered: return "clustered";
    case Regime::disordered: return "disordered";
    default: return "branched-clustered";
  }
}

}  // namespace regimescope::sim
