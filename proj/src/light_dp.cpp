#include "dtsp/light_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "dtsp/errors.hpp"

namespace dtsp {

using Pair = std::pair<PointId, PointId>;

double portal_grid(double s, double ddim, int top, double eps) {
  const double want = ddim * std::max(top, 1) / eps;
  double M = s;
  while (M < want * (1.0 - kRadiusTol)) M *= s;
  return M;
}

double theoretical_portal_count(double s, double ddim, std::size_t n,
                                double eps) {
  const double logs_n = std::log(double(std::max<std::size_t>(n, 2))) / std::log(s);
  return std::pow(8.0 * logs_n * s * ddim / eps, ddim);
}

PortalSet choose_portals(const MetricSpace& space, const NetHierarchy& h,
                         int level, std::span<const PointId> members, double M,
                         std::size_t m_cap) {
  PortalSet out;
  const int steps = std::max(0, int(std::lround(std::log(M) / std::log(h.s()))));
  out.fine_level = level - steps;
  PointSet ordered;
  std::set<PointId> seen;
  const int coarse = std::min(std::max(level, 0), h.top());
  for (int j = coarse; j >= out.fine_level && ordered.size() < m_cap; --j) {
    PointSet covers;
    for (PointId p : members) covers.push_back(h.cover(p, j));
    std::sort(covers.begin(), covers.end());
    covers.erase(std::unique(covers.begin(), covers.end()), covers.end());
    for (PointId c : covers)
      if (ordered.size() < m_cap && seen.insert(c).second) ordered.push_back(c);
    if (j <= 0) break;  // every finer level is H_0
  }
  out.portals = std::move(ordered);
  std::sort(out.portals.begin(), out.portals.end());
  for (PointId p : members) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId q : out.portals) best = std::min(best, space.dist(p, q));
    out.coverage = std::max(out.coverage, best);
  }
  return out;
}

std::shared_ptr<const DpNode> point_node(PointId p) {
  auto node = std::make_shared<DpNode>();
  node->level = -1;
  node->members = {p};
  node->portals = {p};
  LightOption opt;
  opt.pairs = {{p, p}};
  opt.plan = {{p, p, {}}};
  node->options.push_back(std::move(opt));
  return node;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kUntouched = 0, kDone = 1;

enum class MoveKind : std::uint8_t { Init, Start, Enter, Continue, End };

struct Rec {
  double cost;
  std::uint32_t prev;
  MoveKind kind;
  std::uint32_t child = 0, option = 0, seg = 0;
  PointId from = 0, to = 0;
};

// Interns multisets of pairs (kept sorted).
class PairSets {
 public:
  std::uint32_t id(const std::vector<Pair>& v) {
    auto [it, fresh] = ids_.emplace(v, std::uint32_t(sets_.size()));
    if (fresh) sets_.push_back(v);
    return it->second;
  }
  const std::vector<Pair>& get(std::uint32_t k) const { return sets_[k]; }

 private:
  std::map<std::vector<Pair>, std::uint32_t> ids_;
  std::vector<std::vector<Pair>> sets_;
};

std::vector<Pair> without(const std::vector<Pair>& v, std::size_t k) {
  std::vector<Pair> out;
  out.reserve(v.size() - 1);
  for (std::size_t t = 0; t < v.size(); ++t)
    if (t != k) out.push_back(v[t]);
  return out;
}

struct Kid {
  const DpNode* node;
  PairSets rems;
  // after_enter[o][e]: status after entering option o through segment e
  std::vector<std::vector<std::uint32_t>> after_enter;
  std::map<std::pair<std::uint32_t, std::size_t>, std::uint32_t> after_continue;

  std::uint32_t status_of(const std::vector<Pair>& rem) {
    return rem.empty() ? kDone : 2 + rems.id(rem);
  }
};

// State layout: [status per child..., x, a, pairs]. x == kNone inside a
// segment means no child has been visited yet; a == kNone means between
// segments.
std::string encode(const std::vector<std::uint32_t>& w) {
  std::string s(w.size() * 4, '\0');
  std::memcpy(s.data(), w.data(), s.size());
  return s;
}

std::vector<std::uint32_t> decode(const std::string& s) {
  std::vector<std::uint32_t> w(s.size() / 4);
  std::memcpy(w.data(), s.data(), s.size());
  return w;
}

}  // namespace

std::vector<LightOption> combine_children(
    const MetricSpace& space, std::span<const PointId> portals,
    const std::vector<std::shared_ptr<const DpNode>>& children, int max_pairs,
    bool closed_root, std::size_t state_budget, std::size_t* states_out) {
  if (children.empty()) throw ConfigError("combine_children needs children");
  if (portals.empty()) throw ConfigError("cluster without portals");
  if (max_pairs < 1) throw ConfigError("at least one segment per cluster");
  const std::size_t k = children.size();
  std::vector<Kid> kids(k);
  for (std::size_t c = 0; c < k; ++c) {
    kids[c].node = children[c].get();
    const auto& opts = kids[c].node->options;
    if (opts.empty()) throw Infeasible("child cluster has no options");
    kids[c].after_enter.resize(opts.size());
    for (std::size_t o = 0; o < opts.size(); ++o)
      for (std::size_t e = 0; e < opts[o].pairs.size(); ++e)
        kids[c].after_enter[o].push_back(kids[c].status_of(without(opts[o].pairs, e)));
  }

  PairSets done_pairs;
  done_pairs.id({});
  std::vector<Rec> arena;
  arena.push_back({0.0, kNone, MoveKind::Init});
  std::vector<std::uint32_t> init(k + 3, kUntouched);
  init[k] = kNone;
  init[k + 1] = kNone;
  init[k + 2] = 0;

  std::unordered_map<std::string, std::uint32_t> cur{{encode(init), 0}}, next;
  std::map<std::uint32_t, std::uint32_t> finals;  // pairs id -> arena index

  auto relax = [&](std::vector<std::uint32_t>& w, double cost, std::uint32_t prev,
                   Rec move) {
    move.cost = cost;
    move.prev = prev;
    auto [it, fresh] = next.emplace(encode(w), std::uint32_t(arena.size()));
    if (fresh) {
      arena.push_back(move);
      if (arena.size() > state_budget)
        throw BudgetExceeded("DP state budget of " + std::to_string(state_budget) +
                             " exceeded (" + std::to_string(k) + " children, " +
                             std::to_string(portals.size()) + " portals)");
    } else if (cost < arena[it->second].cost) {
      arena[it->second] = move;
    }
  };

  while (!cur.empty()) {
    next.clear();
    for (const auto& [key, idx] : cur) {
      std::vector<std::uint32_t> w = decode(key);
      const double cost = arena[idx].cost;
      const std::uint32_t x = w[k], a = w[k + 1], pid = w[k + 2];
      const bool all_done = std::all_of(w.begin(), w.begin() + k,
                                        [](std::uint32_t s) { return s == kDone; });
      const std::vector<Pair> made = done_pairs.get(pid);

      if (a == kNone) {
        if (all_done || int(made.size()) >= max_pairs) continue;
        const PointId last = made.empty() ? 0 : made.back().first;
        for (PointId p : portals) {
          if (p < last) continue;
          w[k + 1] = p;
          Rec mv{};
          mv.kind = MoveKind::Start;
          mv.from = p;
          relax(w, cost, idx, mv);
        }
        w[k + 1] = a;
        continue;
      }

      const PointId here = x == kNone ? a : x;
      for (std::size_t c = 0; c < k; ++c) {
        const std::uint32_t st = w[c];
        if (st == kDone) continue;
        Kid& kid = kids[c];
        if (st == kUntouched) {
          const auto& opts = kid.node->options;
          for (std::size_t o = 0; o < opts.size(); ++o)
            for (std::size_t e = 0; e < opts[o].pairs.size(); ++e) {
              const auto [p, q] = opts[o].pairs[e];
              for (int flip = 0; flip < (p == q ? 1 : 2); ++flip) {
                const PointId in = flip ? q : p, out = flip ? p : q;
                w[c] = kid.after_enter[o][e];
                w[k] = out;
                Rec mv{};
                mv.kind = MoveKind::Enter;
                mv.child = std::uint32_t(c);
                mv.option = std::uint32_t(o);
                mv.seg = std::uint32_t(e);
                mv.from = in;
                mv.to = out;
                relax(w, cost + space.dist(here, in) + opts[o].cost, idx, mv);
              }
            }
        } else {
          const std::uint32_t rid = st - 2;
          const std::vector<Pair> rem = kid.rems.get(rid);
          for (std::size_t t = 0; t < rem.size(); ++t) {
            if (t > 0 && rem[t] == rem[t - 1]) continue;
            auto [it, fresh] = kid.after_continue.emplace(std::make_pair(rid, t), 0);
            if (fresh) it->second = kid.status_of(without(rem, t));
            const auto [p, q] = rem[t];
            for (int flip = 0; flip < (p == q ? 1 : 2); ++flip) {
              const PointId in = flip ? q : p, out = flip ? p : q;
              w[c] = it->second;
              w[k] = out;
              Rec mv{};
              mv.kind = MoveKind::Continue;
              mv.child = std::uint32_t(c);
              mv.from = in;
              mv.to = out;
              relax(w, cost + space.dist(here, in), idx, mv);
            }
          }
        }
        w[c] = st;
        w[k] = x;
      }

      if (x == kNone) continue;  // a segment must visit some child
      for (PointId b : portals) {
        if (closed_root ? b != a : b < a) continue;
        std::vector<Pair> grown = made;
        grown.emplace_back(a, b);
        std::sort(grown.begin(), grown.end());
        const std::uint32_t gid = done_pairs.id(grown);
        const double total = cost + space.dist(x, b);
        Rec mv{};
        mv.kind = MoveKind::End;
        mv.to = b;
        if (all_done) {
          mv.cost = total;
          mv.prev = idx;
          auto [it, fresh] = finals.emplace(gid, std::uint32_t(arena.size()));
          if (fresh)
            arena.push_back(mv);
          else if (total < arena[it->second].cost)
            arena[it->second] = mv;
          continue;
        }
        std::vector<std::uint32_t> w2 = w;
        w2[k] = kNone;
        w2[k + 1] = kNone;
        w2[k + 2] = gid;
        relax(w2, total, idx, mv);
      }
    }
    std::swap(cur, next);
  }
  if (states_out) *states_out += arena.size();

  std::vector<LightOption> out;
  for (const auto& [gid, fin] : finals) {
    std::vector<Rec> moves;
    for (std::uint32_t at = fin; arena[at].kind != MoveKind::Init; at = arena[at].prev)
      moves.push_back(arena[at]);
    std::reverse(moves.begin(), moves.end());

    std::vector<std::uint32_t> chosen(k, kNone);
    std::vector<std::vector<bool>> used(k);
    LightOption opt;
    opt.cost = arena[fin].cost;
    PlanSegment seg{};
    for (const Rec& mv : moves) {
      switch (mv.kind) {
        case MoveKind::Start:
          seg = {mv.from, mv.from, {}};
          break;
        case MoveKind::Enter: {
          chosen[mv.child] = mv.option;
          const auto& pairs = kids[mv.child].node->options[mv.option].pairs;
          used[mv.child].assign(pairs.size(), false);
          used[mv.child][mv.seg] = true;
          seg.steps.push_back({mv.child, mv.option, mv.seg, mv.from != pairs[mv.seg].first});
          break;
        }
        case MoveKind::Continue: {
          const std::uint32_t o = chosen[mv.child];
          const auto& pairs = kids[mv.child].node->options[o].pairs;
          const Pair want{std::min(mv.from, mv.to), std::max(mv.from, mv.to)};
          std::uint32_t e = 0;
          while (used[mv.child][e] || pairs[e] != want) ++e;
          used[mv.child][e] = true;
          seg.steps.push_back({mv.child, o, e, mv.from != pairs[e].first});
          break;
        }
        case MoveKind::End:
          seg.b = mv.to;
          opt.plan.push_back(std::move(seg));
          seg = {};
          break;
        case MoveKind::Init:
          break;
      }
    }
    std::stable_sort(opt.plan.begin(), opt.plan.end(),
                     [](const PlanSegment& l, const PlanSegment& r) {
                       return std::tie(l.a, l.b) < std::tie(r.a, r.b);
                     });
    for (const auto& s : opt.plan) opt.pairs.emplace_back(s.a, s.b);
    out.push_back(std::move(opt));
  }
  if (out.empty()) throw Infeasible("no valid portal configuration");
  return out;
}

std::size_t prune_dominated(const MetricSpace& space,
                            std::vector<LightOption>& options) {
  std::map<std::vector<Pair>, double> cost;
  for (const auto& o : options) cost[o.pairs] = o.cost;
  std::vector<bool> drop(options.size(), false);
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto& pairs = options[i].pairs;
    if (pairs.size() < 2) continue;
    for (std::size_t e = 0; e < pairs.size() && !drop[i]; ++e) {
      auto it = cost.find(without(pairs, e));
      if (it == cost.end()) continue;
      const double direct = space.dist(pairs[e].first, pairs[e].second);
      if (it->second + direct <= options[i].cost * (1.0 + 1e-12)) drop[i] = true;
    }
  }
  std::size_t removed = 0;
  std::vector<LightOption> kept;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (drop[i])
      ++removed;
    else
      kept.push_back(std::move(options[i]));
  }
  options = std::move(kept);
  return removed;
}

namespace {

void expand_segment(const DpNode& node, const LightOption& opt,
                    const PlanSegment& seg, bool reversed,
                    std::vector<PointId>& out) {
  std::vector<PointId> seq{seg.a};
  for (const PlanStep& st : seg.steps) {
    const DpNode& child = *node.formations[opt.formation][st.child];
    const LightOption& copt = child.options[st.option];
    expand_segment(child, copt, copt.plan[st.segment], st.reversed, seq);
  }
  seq.push_back(seg.b);
  if (reversed) std::reverse(seq.begin(), seq.end());
  for (PointId p : seq)
    if (out.empty() || out.back() != p) out.push_back(p);
}

struct Builder {
  const MetricSpace& space;
  const NetHierarchy& h;
  const LightParams& params;
  double M;
  LightStats stats;

  std::vector<std::shared_ptr<const DpNode>> point_children(const PointSet& members) {
    std::vector<std::shared_ptr<const DpNode>> kids;
    for (PointId p : members) kids.push_back(point_node(p));
    return kids;
  }

  // Fills portals and options from node->formations.
  void finish(DpNode& node, bool root) {
    node.portals = choose_portals(space, h, node.level, node.members, M, params.m_cap).portals;
    const int max_pairs = root ? 1 : std::max(1, params.r / 2);
    std::map<std::vector<Pair>, LightOption> best;
    for (std::size_t f = 0; f < node.formations.size(); ++f) {
      auto opts = combine_children(space, node.portals, node.formations[f], max_pairs,
                                   root, params.state_budget, &node.states);
      for (auto& o : opts) {
        o.formation = std::uint32_t(f);
        auto it = best.find(o.pairs);
        if (it == best.end())
          best.emplace(o.pairs, std::move(o));
        else if (o.cost < it->second.cost)
          it->second = std::move(o);
      }
      stats.max_children = std::max(stats.max_children, node.formations[f].size());
    }
    for (auto& [pairs, o] : best) node.options.push_back(std::move(o));
    if (!root) node.pruned = prune_dominated(space, node.options);
    ++stats.nodes;
    stats.states += node.states;
    stats.max_options = std::max(stats.max_options, node.options.size());
    stats.max_portals = std::max(stats.max_portals, node.portals.size());
    stats.formations += node.formations.size();
  }

  std::shared_ptr<const DpNode> from_tree(const ClusterTree& tree, std::size_t k,
                                          bool root, int depth) {
    const ClusterNode& cn = tree.nodes[k];
    auto node = std::make_shared<DpNode>();
    node->level = cn.level;
    node->members = cn.members;
    if (cn.children.empty() || cn.members.size() == 1) {
      node->formations.push_back(point_children(cn.members));
    } else {
      std::vector<std::shared_ptr<const DpNode>> kids(cn.children.size());
      if (depth == 0 && params.threads > 1 && cn.children.size() > 1) {
        // Children are independent; each sub-build is deterministic.
        std::vector<std::future<std::pair<std::shared_ptr<const DpNode>, LightStats>>> jobs;
        for (std::size_t c : cn.children)
          jobs.push_back(std::async(std::launch::async, [this, &tree, c] {
            Builder sub{space, h, params, M, {}};
            auto n = sub.from_tree(tree, c, false, 1);
            return std::make_pair(n, sub.stats);
          }));
        for (std::size_t c = 0; c < jobs.size(); ++c) {
          auto [n, st] = jobs[c].get();
          kids[c] = n;
          merge(st);
        }
      } else {
        for (std::size_t c = 0; c < cn.children.size(); ++c)
          kids[c] = from_tree(tree, cn.children[c], false, depth + 1);
      }
      node->formations.push_back(std::move(kids));
    }
    finish(*node, root);
    return node;
  }

  void merge(const LightStats& st) {
    stats.nodes += st.nodes;
    stats.states += st.states;
    stats.max_options = std::max(stats.max_options, st.max_options);
    stats.max_children = std::max(stats.max_children, st.max_children);
    stats.max_portals = std::max(stats.max_portals, st.max_portals);
    stats.formations += st.formations;
    stats.formations_truncated += st.formations_truncated;
  }
};

void audit(const DpNode& node, std::size_t option, std::size_t max_segments,
           LightResult& res, std::set<std::pair<const DpNode*, std::size_t>>& seen) {
  if (!seen.insert({&node, option}).second) return;
  const LightOption& opt = node.options[option];
  if (node.level >= 0) {
    res.max_segments_used = std::max(res.max_segments_used, opt.pairs.size());
    if (opt.pairs.size() > max_segments) res.light_ok = false;
    for (const auto& [a, b] : opt.pairs)
      if (!std::binary_search(node.portals.begin(), node.portals.end(), a) ||
          !std::binary_search(node.portals.begin(), node.portals.end(), b))
        res.light_ok = false;
  }
  for (const auto& seg : opt.plan)
    for (const auto& st : seg.steps)
      audit(*node.formations[opt.formation][st.child], st.option, max_segments, res, seen);
}

LightResult finish_root(const MetricSpace& space, const DpNode& root,
                        const LightStats& stats, int r) {
  LightResult res;
  std::size_t best = 0;
  for (std::size_t o = 1; o < root.options.size(); ++o)
    if (root.options[o].cost < root.options[best].cost) best = o;
  std::vector<PointId> seq = expand_option(root, best);
  res.dp_cost = root.options[best].cost;
  res.tour = shortcut_to_hamiltonian(Tour{std::move(seq), true});
  res.weight = tour_weight(space, res.tour);
  res.stats = stats;
  std::set<std::pair<const DpNode*, std::size_t>> seen;
  // The root carries one closed segment; clusters below carry up to r/2.
  for (const auto& seg : root.options[best].plan)
    for (const auto& st : seg.steps)
      audit(*root.formations[root.options[best].formation][st.child], st.option,
            std::size_t(std::max(1, r / 2)), res, seen);
  return res;
}

void check_params(const LightParams& p) {
  if (p.r < 2 || p.r % 2) throw ConfigError("r must be even and at least 2");
  if (p.m_cap < 1) throw ConfigError("m_cap must be at least 1");
}

}  // namespace

std::vector<PointId> expand_option(const DpNode& node, std::size_t option) {
  const LightOption& opt = node.options[option];
  std::vector<PointId> out;
  for (const auto& seg : opt.plan) expand_segment(node, opt, seg, false, out);
  if (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return out;
}

LightResult solve_light_tour(const MetricSpace& space, const NetHierarchy& h,
                             const ClusterTree& tree, const LightParams& params) {
  check_params(params);
  if (tree.nodes.empty()) throw ConfigError("empty cluster tree");
  const double M = params.M > 0 ? params.M
                                : portal_grid(h.s(), params.ddim, h.top(), params.eps);
  Builder b{space, h, params, M, {}};
  auto root = b.from_tree(tree, 0, true, 0);
  return finish_root(space, *root, b.stats, params.r);
}

LightResult solve_flat(const MetricSpace& space) {
  const std::size_t n = space.size();
  if (n == 0) throw DegenerateInstance("empty instance");
  DpNode root;
  root.members = space.all_points();
  root.portals = root.members;
  std::vector<std::shared_ptr<const DpNode>> kids;
  for (PointId p : root.members) kids.push_back(point_node(p));
  root.formations.push_back(std::move(kids));
  root.options = combine_children(space, root.portals, root.formations[0], 1, true,
                                  std::numeric_limits<std::size_t>::max(), &root.states);
  LightStats stats;
  stats.nodes = 1;
  stats.states = root.states;
  stats.max_children = n;
  stats.max_portals = n;
  stats.max_options = root.options.size();
  return finish_root(space, root, stats, int(2 * n));
}

namespace {

struct Guesser {
  const MetricSpace& space;
  const NetHierarchy& h;
  const LightParams& params;
  std::uint32_t g;
  std::uint64_t seed;
  Builder builder;
  std::map<std::pair<int, PointSet>, std::shared_ptr<const DpNode>> memo;

  // Distinct partitions of members at `level`, DFS over centers in ascending
  // index with g keyed radii each; the all-guess-0 partition comes first.
  std::vector<std::vector<PointSet>> formations(const PointSet& members, int level) {
    const PointSet& net = h.net(level);
    const double a = h.radius(level);
    std::vector<std::vector<PointSet>> out;
    std::set<std::vector<PointSet>> distinct;
    std::size_t visits = 0;
    const std::size_t visit_cap = 64 * params.formation_cap + 64;
    bool truncated = false;
    std::vector<PointSet> clusters;

    auto dfs = [&](auto&& self, std::size_t at, const PointSet& pending) -> void {
      if (out.size() >= params.formation_cap || ++visits > visit_cap) {
        truncated = true;
        return;
      }
      std::size_t u_at = at;
      for (; u_at < net.size() && !pending.empty(); ++u_at) {
        bool relevant = false;
        for (PointId p : pending)
          if (within(space.dist(net[u_at], p), 2.0 * a)) {
            relevant = true;
            break;
          }
        if (relevant) break;
      }
      if (pending.empty() || u_at == net.size()) {
        if (!pending.empty()) return;  // cannot happen for a valid net
        std::vector<PointSet> key = clusters;
        std::sort(key.begin(), key.end());
        if (distinct.insert(key).second) out.push_back(clusters);
        return;
      }
      const PointId u = net[u_at];
      std::set<PointSet> tried;
      for (std::uint32_t k = 0; k < g; ++k) {
        const double r = keyed_radius(h, level, u, {params.ddim, seed, k});
        PointSet take, rest;
        for (PointId p : pending) (within(space.dist(u, p), r) ? take : rest).push_back(p);
        if (!tried.insert(take).second) continue;
        if (!take.empty()) clusters.push_back(take);
        self(self, u_at + 1, rest);
        if (!take.empty()) clusters.pop_back();
      }
    };
    dfs(dfs, 0, members);
    if (truncated) ++builder.stats.formations_truncated;
    return out;
  }

  std::shared_ptr<const DpNode> table(int level, const PointSet& members, bool root) {
    if (!root) {
      auto it = memo.find({level, members});
      if (it != memo.end()) return it->second;
    }
    auto node = std::make_shared<DpNode>();
    node->level = level;
    node->members = members;
    if (level <= 0 || members.size() == 1) {
      node->formations.push_back(builder.point_children(members));
    } else {
      for (const auto& f : formations(members, level - 1)) {
        std::vector<std::shared_ptr<const DpNode>> kids;
        for (const PointSet& c : f) kids.push_back(table(level - 1, c, false));
        node->formations.push_back(std::move(kids));
      }
    }
    builder.finish(*node, root);
    if (!root) memo.emplace(std::make_pair(level, members), node);
    return node;
  }
};

}  // namespace

LightResult solve_with_radius_guessing(const MetricSpace& space,
                                       const NetHierarchy& h, std::uint32_t g,
                                       const LightParams& params,
                                       std::uint64_t seed) {
  check_params(params);
  if (g < 1) throw ConfigError("at least one radius guess per center");
  const double M = params.M > 0 ? params.M
                                : portal_grid(h.s(), params.ddim, h.top(), params.eps);
  Guesser gs{space, h, params, g, seed, Builder{space, h, params, M, {}}, {}};
  auto root = gs.table(h.top(), space.all_points(), true);
  return finish_root(space, *root, gs.builder.stats, params.r);
}

}  // namespace dtsp
