#include "cradar/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace cradar {

namespace {

inline int pick_index(RandomStream& rng, int n) {
  return static_cast<int>(rng.uniform01() * n);
}

}  // namespace

GenResult generate(const TargetState& s, int action_bin, const GeneratorState& g,
                   RandomStream& rng) {
  if (action_bin < 0 || action_bin >= g.grid.l_theta)
    throw SimulationError("action bin out of range");
  GenResult r;
  r.next = g.motion.step(s, rng);
  if (!(r.next.x > 0.0) || !(r.next.range() > 0.0)) {
    r.in_fov = false;
    return r;
  }
  const int true_bin = g.grid.bin_of(r.next.angle_deg());
  if (action_bin != true_bin) return r;  // wrong bin: empty observation, no reward

  r.reward = 1.0;
  const std::complex<double> alpha = g.rcs.amplitude(r.next, rng);
  const std::complex<double> alpha_hat = alpha + rng.complex_normal(g.sigma_hat);
  if (wald_statistic(alpha_hat, g.sigma_hat) >= g.lambda) {
    r.raw_mag = std::abs(alpha_hat);
    r.obs = discretize(r.raw_mag, g.sigma_hat);
  }
  return r;
}

std::uint32_t SearchTree::fresh_node(int n_actions) {
  nodes_.emplace_back();
  nodes_.back().acts.resize(n_actions);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

int SearchTree::select_ucb(const Node& node, double c_ucb) const {
  const int n_actions = static_cast<int>(node.acts.size());
  for (int a = 0; a < n_actions; ++a)
    if (node.acts[a].n == 0) return a;  // unvisited always wins
  const double logn = std::log(static_cast<double>(node.visits) + 1.0);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n_actions; ++a) {
    const auto& st = node.acts[a];
    const double score =
        st.q + c_ucb * std::sqrt(logn / static_cast<double>(st.n));
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

double SearchTree::rollout(const TargetState& s, int depth, const GeneratorState& g,
                           const PlannerParams& params, RandomStream& rng) {
  double total = 0.0;
  double disc = 1.0;
  TargetState cur = s;
  for (int d = depth; d < params.max_depth; ++d) {
    const int a = pick_index(rng, g.grid.l_theta);
    const GenResult gr = generate(cur, a, g, rng);
    if (!gr.in_fov) break;
    total += disc * gr.reward;
    disc *= params.discount;
    cur = gr.next;
  }
  return total;
}

double SearchTree::simulate(std::uint32_t id, const TargetState& s, int depth,
                            const GeneratorState& g, const PlannerParams& params,
                            RandomStream& rng) {
  if (depth >= params.max_depth) return 0.0;
  const int a = select_ucb(nodes_[id], params.c_ucb);
  const GenResult gr = generate(s, a, g, rng);

  double child_return = 0.0;
  if (gr.in_fov) {
    const std::uint64_t key = edge_key(a, gr.obs);
    const auto it = nodes_[id].kids.find(key);
    std::uint32_t child;
    if (it != nodes_[id].kids.end()) {
      child = it->second;
      child_return = simulate(child, gr.next, depth + 1, g, params, rng);
    } else {
      child = fresh_node(static_cast<int>(nodes_[id].acts.size()));  // may reallocate
      nodes_[id].kids.emplace(key, child);
      child_return = rollout(gr.next, depth + 1, g, params, rng);
    }
    if (depth == 0) nodes_[child].particles.push_back(gr.next);
  }

  const double ret = gr.reward + params.discount * child_return;
  Node& node = nodes_[id];
  node.visits++;
  ActionStat& st = node.acts[a];
  st.n++;
  st.q += (ret - st.q) / static_cast<double>(st.n);
  return ret;
}

int SearchTree::plan(const BeliefSet& belief, const GeneratorState& g,
                     const PlannerParams& params, RandomStream& rng) {
  if (belief.particles.empty()) throw SimulationError("cannot plan on an empty belief");
  if (params.n_sim < 1) throw ConfigError("n_sim must be positive");

  n_actions_ = g.grid.l_theta;
  if (!has_root_ ||
      static_cast<int>(nodes_[root_].acts.size()) != n_actions_) {
    reset();
    root_ = fresh_node(n_actions_);
    has_root_ = true;
  }

  for (int i = 0; i < params.n_sim; ++i) {
    const TargetState s = belief.particles[pick_index(rng, belief.size())];
    simulate(root_, s, 0, g, params, rng);
  }

  const Node& root = nodes_[root_];
  int best = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (int a = 0; a < n_actions_; ++a) {
    if (root.acts[a].n == 0) continue;
    if (root.acts[a].q > best_q) {
      best_q = root.acts[a].q;
      best = a;
      any = true;
    }
  }
  return any ? best : 0;
}

void SearchTree::advance_root(int action, ObsKey obs) {
  if (!has_root_) return;
  const auto it = nodes_[root_].kids.find(edge_key(action, obs));
  if (it == nodes_[root_].kids.end()) {
    reset();
    return;
  }
  // Compact the surviving subtree into a fresh arena. Freshly copied nodes
  // still hold child indices into the old arena until they are processed.
  std::vector<Node> fresh;
  std::deque<std::uint32_t> pending;
  fresh.push_back(std::move(nodes_[it->second]));
  pending.push_back(0);
  while (!pending.empty()) {
    const std::uint32_t nid = pending.front();
    pending.pop_front();
    const std::vector<std::pair<std::uint64_t, std::uint32_t>> kids(
        fresh[nid].kids.begin(), fresh[nid].kids.end());
    for (const auto& [key, old_kid] : kids) {
      fresh.push_back(std::move(nodes_[old_kid]));
      const auto new_kid = static_cast<std::uint32_t>(fresh.size() - 1);
      fresh[nid].kids[key] = new_kid;
      pending.push_back(new_kid);
    }
  }
  nodes_ = std::move(fresh);
  root_ = 0;
  has_root_ = true;
}

void SearchTree::reset() {
  nodes_.clear();
  has_root_ = false;
}

std::uint64_t SearchTree::root_visits() const {
  return has_root_ ? nodes_[root_].visits : 0;
}

double SearchTree::root_value(int action_bin) const {
  if (!has_root_) throw SimulationError("no search tree");
  const auto& acts = nodes_[root_].acts;
  if (action_bin < 0 || action_bin >= static_cast<int>(acts.size()))
    throw SimulationError("action bin out of range");
  return acts[action_bin].q;
}

const std::vector<TargetState>& SearchTree::root_particles_of(int action_bin,
                                                              ObsKey obs) const {
  static const std::vector<TargetState> empty;
  if (!has_root_) return empty;
  const auto it = nodes_[root_].kids.find(edge_key(action_bin, obs));
  if (it == nodes_[root_].kids.end()) return empty;
  return nodes_[it->second].particles;
}

BeliefSet update_belief(const BeliefSet& belief, int action_bin, const Observation& obs,
                        const GeneratorState& g, const PlannerParams& params,
                        RandomStream& rng) {
  if (belief.particles.empty()) throw SimulationError("cannot update an empty belief");
  const int n = belief.size();
  const ObsKey key = obs.detected ? static_cast<ObsKey>(discretize(obs.raw_mag, g.sigma_hat))
                                  : kEmptyObs;

  BeliefSet out;
  out.particles.reserve(n);
  auto try_accept = [&](const TargetState& p) {
    const GenResult gr = generate(p, action_bin, g, rng);
    if (gr.in_fov && gr.obs == key) out.particles.push_back(gr.next);
  };

  for (const auto& p : belief.particles) try_accept(p);

  const long budget = static_cast<long>(params.refill_attempts_factor) * n;
  for (long attempt = 0; out.size() < n && attempt < budget; ++attempt)
    try_accept(belief.particles[pick_index(rng, n)]);

  if (out.particles.empty()) {
    // Nothing matched: carry the propagated prior forward unconditioned.
    for (const auto& p : belief.particles) {
      TargetState q = p;
      bool ok = false;
      for (int tries = 0; tries < 16 && !ok; ++tries) {
        q = g.motion.step(p, rng);
        ok = q.x > 0.0 && q.range() > 0.0;
      }
      out.particles.push_back(ok ? q : p);
    }
    return out;
  }

  // Top up by duplicating survivors under a process-noise-shaped jitter.
  const int survivors = out.size();
  const double gp = 0.5 * g.motion.dt * g.motion.dt * g.motion.sigma_s;
  const double gv = g.motion.dt * g.motion.sigma_s;
  while (out.size() < n) {
    TargetState j = out.particles[pick_index(rng, survivors)];
    auto [wx, wy] = rng.normal_pair();
    j.x += gp * wx;
    j.vx += gv * wx;
    j.y += gp * wy;
    j.vy += gv * wy;
    if (!(j.x > 0.0) || !(j.range() > 0.0))
      j = out.particles[pick_index(rng, survivors)];
    out.particles.push_back(j);
  }
  return out;
}

TargetState predict_mean(const BeliefSet& belief, const MotionModel& motion) {
  if (belief.particles.empty()) throw SimulationError("empty belief has no mean");
  TargetState m;
  for (const auto& p : belief.particles) {
    m.x += p.x;
    m.vx += p.vx;
    m.y += p.y;
    m.vy += p.vy;
  }
  const double inv = 1.0 / belief.size();
  m.x *= inv;
  m.vx *= inv;
  m.y *= inv;
  m.vy *= inv;
  return motion.drift(m);
}

}  // namespace cradar
