#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cradar/array.hpp"
#include "cradar/detection.hpp"
#include "cradar/rng.hpp"
#include "cradar/scenario.hpp"

namespace cradar {

// Discretized observation branch: kEmptyObs for no detection, otherwise the
// nonnegative magnitude cell index.
using ObsKey = std::int64_t;
inline constexpr ObsKey kEmptyObs = -1;

// Unweighted particle belief over one target's state.
struct BeliefSet {
  std::vector<TargetState> particles;

  int size() const { return static_cast<int>(particles.size()); }
};

// Black-box simulation model for one target: motion, reflectivity, angle
// grid, detection threshold, and the running amplitude-noise level
// (refreshed only when the real measurement detects).
struct GeneratorState {
  MotionModel motion;
  RadarEquationMap rcs;
  AngleGrid grid;
  double lambda = 0.0;
  double sigma_hat = 1.0;

  double beta() const { return std::sqrt(3.0) * sigma_hat; }
};

// Executed action / discretized observation pairs since acquisition.
struct History {
  std::vector<std::pair<int, ObsKey>> steps;
};

struct GenResult {
  TargetState next;
  bool in_fov = true;
  ObsKey obs = kEmptyObs;
  double raw_mag = 0.0;  // |alpha_hat| of the simulated look
  double reward = 0.0;   // 1 when the interrogated bin contains the target
};

// One step of the generative model: propagate the state, simulate the dwell
// at the interrogated bin, and emit (next state, observation, reward).
// A state that leaves the field of view yields in_fov = false with an empty
// observation and zero reward.
GenResult generate(const TargetState& s, int action_bin, const GeneratorState& g,
                   RandomStream& rng);

struct PlannerParams {
  int n_sim = 2000;
  double c_ucb = M_SQRT2;
  int max_depth = 5;
  double discount = 0.95;
  bool tree_reuse = true;
  int refill_attempts_factor = 10;

  static PlannerParams from(const ScenarioConfig& cfg) {
    PlannerParams p;
    p.n_sim = cfg.n_sim;
    p.c_ucb = cfg.c_ucb;
    p.max_depth = cfg.planner.rollout_depth;
    p.discount = cfg.planner.discount;
    p.tree_reuse = cfg.planner.tree_reuse;
    p.refill_attempts_factor = cfg.planner.refill_attempts_factor;
    return p;
  }
};

// Monte Carlo search tree for one target. Nodes hold per-action visit counts
// and value estimates plus a local particle set; children are keyed by
// (action, observation) branches. The tree can be advanced along the realized
// branch between dwells so accumulated statistics are reused.
class SearchTree {
 public:
  // Runs n_sim simulations from particles drawn uniformly out of the belief
  // and returns the bin with the highest estimated value (lowest index on
  // ties; unvisited actions are never returned unless nothing was visited).
  int plan(const BeliefSet& belief, const GeneratorState& g,
           const PlannerParams& params, RandomStream& rng);

  // Promotes the child under (action, obs) to the root, dropping all other
  // branches; resets to an empty tree when the branch was never simulated.
  void advance_root(int action, ObsKey obs);

  void reset();
  std::size_t node_count() const { return nodes_.size(); }
  std::uint64_t root_visits() const;
  double root_value(int action_bin) const;
  const std::vector<TargetState>& root_particles_of(int action_bin, ObsKey obs) const;

 private:
  struct ActionStat {
    std::uint64_t n = 0;
    double q = 0.0;
  };
  struct Node {
    std::uint64_t visits = 0;
    std::vector<ActionStat> acts;
    std::unordered_map<std::uint64_t, std::uint32_t> kids;
    std::vector<TargetState> particles;
  };

  static std::uint64_t edge_key(int action, ObsKey obs) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(action)) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(obs + 1));
  }

  std::uint32_t fresh_node(int n_actions);
  double simulate(std::uint32_t id, const TargetState& s, int depth,
                  const GeneratorState& g, const PlannerParams& params,
                  RandomStream& rng);
  double rollout(const TargetState& s, int depth, const GeneratorState& g,
                 const PlannerParams& params, RandomStream& rng);
  int select_ucb(const Node& node, double c_ucb) const;

  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  bool has_root_ = false;
  int n_actions_ = 0;
};

// Rejection-based belief update: every particle is propagated through the
// generator under the executed action and kept when its simulated discretized
// observation matches the real one; the set is refilled to its original size
// by further rejection draws, then jittered duplication of survivors, and
// falls back to unconditioned propagation when nothing matches.
BeliefSet update_belief(const BeliefSet& belief, int action_bin, const Observation& obs,
                        const GeneratorState& g, const PlannerParams& params,
                        RandomStream& rng);

// Mean of the one-step-ahead propagated belief (noise-free drift of the mean).
TargetState predict_mean(const BeliefSet& belief, const MotionModel& motion);

}  // namespace cradar
