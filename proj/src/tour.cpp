#include "dtsp/tour.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "dtsp/errors.hpp"

namespace dtsp {

double tour_weight(const MetricSpace& space, const Tour& t) {
  double w = 0.0;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [a, b] = t.transition(k);
    w += space.dist(a, b);
  }
  return w;
}

double edges_weight(const EdgeSet& edges) {
  double w = 0.0;
  for (const Edge& e : edges) w += e.w;
  return w;
}

PointSet visited(const Tour& t) {
  PointSet out(t.seq);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool visits_all(const Tour& t, std::span<const PointId> points) {
  const PointSet v = visited(t);
  return std::all_of(points.begin(), points.end(), [&](PointId p) {
    return std::binary_search(v.begin(), v.end(), p);
  });
}

namespace {

void collapse_runs(std::vector<PointId>& w) {
  w.erase(std::unique(w.begin(), w.end()), w.end());
}

// Returns (i, j), i < j, with w[i..i+1] == w[j..j+1], or nullopt.
std::optional<std::pair<std::size_t, std::size_t>> repeated_edge(
    const std::vector<PointId>& w) {
  std::map<std::pair<PointId, PointId>, std::size_t> first;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    auto [it, fresh] = first.emplace(std::make_pair(w[k], w[k + 1]), k);
    if (!fresh) return std::make_pair(it->second, k);
  }
  return std::nullopt;
}

}  // namespace

Tour shortcut_repeated_edges(const MetricSpace& space, Tour t) {
  (void)space;
  if (t.seq.size() < 2) return t;
  std::vector<PointId> w = t.seq;
  if (t.closed) w.push_back(w.front());
  collapse_runs(w);
  while (auto rep = repeated_edge(w)) {
    const auto [i, j] = *rep;
    std::vector<PointId> next(w.begin(), w.begin() + i + 1);
    next.insert(next.end(), std::make_reverse_iterator(w.begin() + j + 1),
                std::make_reverse_iterator(w.begin() + i + 1));
    next.insert(next.end(), w.begin() + j + 1, w.end());
    collapse_runs(next);
    w = std::move(next);
  }
  if (t.closed && w.size() > 1) w.pop_back();
  t.seq = std::move(w);
  return t;
}

Tour shortcut_to_hamiltonian(Tour t) {
  std::vector<PointId> out;
  std::vector<PointId> seen(t.seq);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  std::vector<bool> done(seen.size(), false);
  for (PointId p : t.seq) {
    const auto k = std::lower_bound(seen.begin(), seen.end(), p) - seen.begin();
    if (done[k]) continue;
    done[k] = true;
    out.push_back(p);
  }
  t.seq = std::move(out);
  return t;
}

EdgeSet mst(const MetricSpace& space, std::span<const PointId> subset) {
  EdgeSet tree;
  const std::size_t k = subset.size();
  if (k < 2) return tree;
  // Keys compare by (weight, smaller id, larger id): a strict total order on
  // edges, so the tree is unique and independent of the start vertex.
  using Key = std::tuple<double, PointId, PointId>;
  const Key none{std::numeric_limits<double>::infinity(), 0, 0};
  std::vector<Key> key(k, none);
  std::vector<bool> in(k, false);
  auto edge_key = [&](std::size_t a, std::size_t b) {
    const PointId u = subset[a], v = subset[b];
    return Key{space.dist(u, v), std::min(u, v), std::max(u, v)};
  };
  in[0] = true;
  for (std::size_t b = 1; b < k; ++b) key[b] = edge_key(0, b);
  for (std::size_t step = 1; step < k; ++step) {
    std::size_t best = k;
    for (std::size_t b = 0; b < k; ++b)
      if (!in[b] && (best == k || key[b] < key[best])) best = b;
    in[best] = true;
    const auto& [w, u, v] = key[best];
    tree.push_back({u, v, w});
    for (std::size_t b = 0; b < k; ++b)
      if (!in[b]) {
        const Key cand = edge_key(best, b);
        if (cand < key[b]) key[b] = cand;
      }
  }
  return tree;
}

double mst_weight(const MetricSpace& space, std::span<const PointId> subset) {
  return edges_weight(mst(space, subset));
}

namespace {

std::map<PointId, std::vector<PointId>> adjacency(const EdgeSet& tree) {
  std::map<PointId, std::vector<PointId>> adj;
  for (const Edge& e : tree) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

std::vector<PointId> preorder(const EdgeSet& tree, PointId root) {
  auto adj = adjacency(tree);
  std::vector<PointId> order;
  std::map<PointId, bool> seen;
  std::vector<PointId> stack{root};
  while (!stack.empty()) {
    const PointId v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    order.push_back(v);
    const auto& nb = adj[v];
    for (auto it = nb.rbegin(); it != nb.rend(); ++it)
      if (!seen[*it]) stack.push_back(*it);
  }
  return order;
}

}  // namespace

Tour double_tree_tour(const MetricSpace& space,
                      std::span<const PointId> subset) {
  Tour t;
  if (subset.empty()) return t;
  const PointId root = *std::min_element(subset.begin(), subset.end());
  t.seq = preorder(mst(space, subset), root);
  return t;
}

EdgeSet odd_matching_by_tree(const MetricSpace& space, const EdgeSet& tree,
                             std::span<const PointId> odd) {
  EdgeSet out;
  if (odd.size() % 2 != 0)
    throw OddParity("odd vertex set has odd cardinality " +
                    std::to_string(odd.size()));
  if (odd.empty()) return out;
  if (tree.empty()) throw Disconnected("odd vertices outside the tree");
  PointId root = tree.front().u;
  for (const Edge& e : tree) root = std::min({root, e.u, e.v});
  const std::vector<PointId> order = preorder(tree, root);
  std::map<PointId, std::size_t> rank;
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  std::vector<PointId> seq(odd.begin(), odd.end());
  for (PointId p : seq)
    if (!rank.count(p))
      throw Disconnected("odd vertex " + std::to_string(p) +
                         " is not a tree vertex");
  std::sort(seq.begin(), seq.end(),
            [&](PointId a, PointId b) { return rank[a] < rank[b]; });

  // The doubled-tree walk visits the odd vertices in preorder; the two
  // alternating pairings split that walk, so one of them costs <= w(tree).
  const std::size_t m = seq.size();
  EdgeSet even, shifted;
  double we = 0.0, ws = 0.0;
  for (std::size_t k = 0; k < m; k += 2) {
    const double d = space.dist(seq[k], seq[k + 1]);
    even.push_back({seq[k], seq[k + 1], d});
    we += d;
    const PointId a = seq[k + 1], b = seq[(k + 2) % m];
    const double d2 = space.dist(a, b);
    shifted.push_back({a, b, d2});
    ws += d2;
  }
  return ws < we ? shifted : even;
}

namespace {

struct Walk {
  std::vector<PointId> verts;
  std::vector<std::size_t> edge_ids;  // edge_ids[k] joins verts[k], verts[k+1]
};

Walk euler_with_ids(const EdgeSet& edges, PointId start) {
  std::map<PointId, std::vector<std::pair<PointId, std::size_t>>> adj;
  for (std::size_t id = 0; id < edges.size(); ++id) {
    adj[edges[id].u].push_back({edges[id].v, id});
    if (edges[id].u != edges[id].v) adj[edges[id].v].push_back({edges[id].u, id});
  }
  for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());
  std::map<PointId, std::size_t> cursor;
  std::vector<bool> used(edges.size(), false);

  // Iterative Hierholzer; the finished walk comes out reversed.
  std::vector<std::pair<PointId, std::size_t>> stack{{start, SIZE_MAX}};
  Walk rev;
  while (!stack.empty()) {
    const PointId v = stack.back().first;
    auto& nb = adj[v];
    auto& c = cursor[v];
    while (c < nb.size() && used[nb[c].second]) ++c;
    if (c == nb.size()) {
      rev.verts.push_back(v);
      if (stack.back().second != SIZE_MAX) rev.edge_ids.push_back(stack.back().second);
      stack.pop_back();
    } else {
      used[nb[c].second] = true;
      stack.push_back(nb[c]);
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw Disconnected("multigraph is not connected from the start vertex");
  std::reverse(rev.verts.begin(), rev.verts.end());
  std::reverse(rev.edge_ids.begin(), rev.edge_ids.end());
  return rev;
}

}  // namespace

std::vector<PointId> euler_walk(const EdgeSet& edges, PointId start) {
  return euler_with_ids(edges, start).verts;
}

bool transition_respects_nets(const MetricSpace& space, const NetHierarchy& h,
                              double eps, PointId x, PointId y) {
  const double l = space.dist(x, y);
  if (x == y || l <= 0.0) return true;
  const int i = level_for(eps * l, h.s());
  if (i <= 0) return true;
  return h.contains(i, x) && h.contains(i, y);
}

NetRespectCheck is_net_respecting(const MetricSpace& space, const Tour& t,
                                  const NetHierarchy& h, double eps) {
  NetRespectCheck out;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [x, y] = t.transition(k);
    if (!transition_respects_nets(space, h, eps, x, y)) {
      out.ok = false;
      out.violation = std::make_pair(x, y);
      return out;
    }
  }
  return out;
}

namespace {

// Appends the rerouted path from x to y (excluding x, including y).
void reroute(const MetricSpace& space, const NetHierarchy& h, double eps,
             PointId x, PointId y, std::vector<PointId>& out, int depth) {
  if (x == y) return;
  if (depth > 256) throw RecursionLimit("net-respecting reroute did not settle");
  if (transition_respects_nets(space, h, eps, x, y)) {
    out.push_back(y);
    return;
  }
  const int i = level_for(2.0 * eps * space.dist(x, y), h.s());
  const PointId xc = h.cover(x, i), yc = h.cover(y, i);
  reroute(space, h, eps, x, xc, out, depth + 1);
  reroute(space, h, eps, xc, yc, out, depth + 1);
  reroute(space, h, eps, yc, y, out, depth + 1);
}

}  // namespace

Tour make_net_respecting(const MetricSpace& space, const Tour& t,
                         const NetHierarchy& h, double eps) {
  if (!(eps > 0.0 && eps <= 0.125))
    throw ConfigError("make_net_respecting needs 0 < eps <= 1/8");
  Tour out;
  out.closed = t.closed;
  if (t.seq.empty()) return out;
  out.seq.push_back(t.seq.front());
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [x, y] = t.transition(k);
    reroute(space, h, eps, x, y, out.seq, 0);
  }
  if (t.closed && out.seq.size() > 1) out.seq.pop_back();
  return out;
}

namespace {

PointSet sorted_copy(std::span<const PointId> pts) {
  PointSet s(pts.begin(), pts.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool member(const PointSet& s, PointId p) {
  return std::binary_search(s.begin(), s.end(), p);
}

}  // namespace

std::size_t count_crossings(const Tour& t, std::span<const PointId> cluster) {
  const PointSet c = sorted_copy(cluster);
  std::size_t n = 0;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [a, b] = t.transition(k);
    if (member(c, a) != member(c, b)) ++n;
  }
  return n;
}

PointSet cross_points(const Tour& t, std::span<const PointId> cluster) {
  const PointSet c = sorted_copy(cluster);
  PointSet out;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [a, b] = t.transition(k);
    if (member(c, a) != member(c, b)) out.push_back(member(c, a) ? a : b);
  }
  return sorted_copy(out);
}

PointSet patch_anchor_set(const Tour& t, std::span<const PointId> cluster) {
  PointSet anchors = cross_points(t, cluster);
  if (!t.closed && !t.seq.empty()) {
    const PointSet c = sorted_copy(cluster);
    const bool a_in = member(c, t.seq.front()), b_in = member(c, t.seq.back());
    if (a_in != b_in) anchors.push_back(a_in ? t.seq.front() : t.seq.back());
  }
  return sorted_copy(anchors);
}

namespace {

// Tour transition with a flag for the zero-weight edge used to close an
// open tour temporarily.
struct Hop {
  PointId u, v;
  bool virt;
};

struct Marked {
  PointId v;
  bool virt_next;  // the transition leaving v is the virtual edge
};

// Adds a tree matching so that exactly `want` (as a parity multiset) ends up
// with odd degree.
void fix_parity(const MetricSpace& space, EdgeSet& g, const EdgeSet& tree,
                std::initializer_list<PointId> want) {
  std::map<PointId, int> deg;
  for (const Edge& e : g) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (PointId p : want) ++deg[p];
  PointSet odd;
  for (auto [p, d] : deg)
    if (d % 2) odd.push_back(p);
  for (const Edge& e : odd_matching_by_tree(space, tree, odd)) g.push_back(e);
}

std::vector<Marked> marked_walk(const EdgeSet& g, const std::vector<bool>& virt,
                                PointId from) {
  const Walk w = euler_with_ids(g, from);
  std::vector<Marked> out;
  for (std::size_t k = 0; k < w.verts.size(); ++k)
    out.push_back({w.verts[k], k < w.edge_ids.size() && virt[w.edge_ids[k]]});
  return out;
}

// Core construction. The inside walk runs in_from -> pivot, the outside walk
// pivot -> out_to; inside vertices strictly inside the outside walk are
// shortcut. Returns the concatenation (pivot appears once).
std::vector<Marked> rebuild(const MetricSpace& space,
                            const std::vector<Hop>& hops, const PointSet& c,
                            const EdgeSet& tree, PointId in_from,
                            PointId pivot, PointId out_to) {
  EdgeSet gin, gout;
  std::vector<bool> vin, vout;
  for (const Hop& h : hops) {
    const Edge e{h.u, h.v, h.virt ? 0.0 : space.dist(h.u, h.v)};
    const bool iu = member(c, h.u), iv = member(c, h.v);
    if (iu && iv) {
      gin.push_back(e);
      vin.push_back(h.virt);
    } else {
      gout.push_back(e);
      vout.push_back(h.virt);
    }
  }
  for (const Edge& e : tree) {
    gin.push_back(e);
    vin.push_back(false);
    gout.push_back(e);
    vout.push_back(false);
  }
  fix_parity(space, gin, tree, {in_from, pivot});
  fix_parity(space, gout, tree, {pivot, out_to});
  vin.resize(gin.size(), false);
  vout.resize(gout.size(), false);

  std::vector<Marked> pin = marked_walk(gin, vin, in_from);
  std::vector<Marked> pout = marked_walk(gout, vout, pivot);

  std::vector<Marked> out = pin;
  if (out.empty()) out.push_back({pivot, false});
  // pout[0] is the pivot, already the last entry of the inside walk.
  out.back().virt_next = out.back().virt_next || pout.front().virt_next;
  for (std::size_t k = 1; k < pout.size(); ++k) {
    const bool last = k + 1 == pout.size();
    if (!last && member(c, pout[k].v)) continue;
    out.push_back(pout[k]);
  }
  return out;
}

std::vector<Hop> hops_of(const Tour& t) {
  std::vector<Hop> hops;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [a, b] = t.transition(k);
    if (a != b) hops.push_back({a, b, false});
  }
  return hops;
}

Tour rotate_to(std::vector<PointId> seq, PointId first) {
  auto it = std::find(seq.begin(), seq.end(), first);
  if (it != seq.end()) std::rotate(seq.begin(), it, seq.end());
  return {std::move(seq), true};
}

std::vector<PointId> strip(const std::vector<Marked>& m) {
  std::vector<PointId> out;
  for (const Marked& x : m) out.push_back(x.v);
  return out;
}

// First and last crossing in transition order; returns inside endpoints.
std::pair<PointId, PointId> first_last_cross(const std::vector<Hop>& hops,
                                             const PointSet& c) {
  PointId p1 = 0, pc = 0;
  bool any = false;
  for (const Hop& h : hops) {
    const bool iu = member(c, h.u), iv = member(c, h.v);
    if (iu == iv) continue;
    const PointId p = iu ? h.u : h.v;
    if (!any) p1 = p;
    pc = p;
    any = true;
  }
  return {p1, pc};
}

}  // namespace

Tour patch_crossings(const MetricSpace& space, const Tour& t,
                     std::span<const PointId> cluster, PatchTree tree_kind) {
  if (cluster.empty()) throw ConfigError("patch_crossings needs a cluster");
  if (count_crossings(t, cluster) <= 2) return t;
  const PointSet c = sorted_copy(cluster);
  const PointSet anchors = patch_anchor_set(t, cluster);
  const EdgeSet tree =
      mst(space, tree_kind == PatchTree::WholeCluster ? std::span<const PointId>(c)
                                                      : std::span<const PointId>(anchors));

  if (t.closed) {
    const std::vector<Hop> hops = hops_of(t);
    const auto [p1, pc] = first_last_cross(hops, c);
    std::vector<PointId> seq = strip(rebuild(space, hops, c, tree, p1, pc, p1));
    if (seq.size() > 1) seq.pop_back();  // the walk returns to p1
    return rotate_to(std::move(seq), t.seq.front());
  }

  const PointId a = t.seq.front(), b = t.seq.back();
  const bool a_in = member(c, a), b_in = member(c, b);
  if (a_in != b_in) {
    if (!a_in) {
      Tour rev{{t.seq.rbegin(), t.seq.rend()}, false};
      Tour out = patch_crossings(space, rev, cluster, tree_kind);
      std::reverse(out.seq.begin(), out.seq.end());
      return out;
    }
    const std::vector<Hop> hops = hops_of(t);
    const PointId pc = first_last_cross(hops, c).second;
    return {strip(rebuild(space, hops, c, tree, a, pc, b)), false};
  }

  if (a == b) {
    Tour closed{{t.seq.begin(), t.seq.end() - 1}, true};
    Tour out = patch_crossings(space, closed, cluster, tree_kind);
    out.seq.push_back(out.seq.front());
    out.closed = false;
    return out;
  }

  // Same side: close through a zero-weight edge b -> a, patch, cut there.
  std::vector<Hop> hops = hops_of(t);
  hops.push_back({b, a, true});
  const auto [p1, pc] = first_last_cross(hops, c);
  std::vector<Marked> m = rebuild(space, hops, c, tree, p1, pc, p1);
  if (m.size() > 1 && m.back().v == m.front().v) m.pop_back();
  std::size_t cut = m.size();
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k].virt_next) {
      cut = k;
      break;
    }
  if (cut == m.size()) throw Disconnected("virtual edge lost while patching");
  std::vector<PointId> seq;
  for (std::size_t k = 1; k <= m.size(); ++k) seq.push_back(m[(cut + k) % m.size()].v);
  if (seq.front() != a) std::reverse(seq.begin(), seq.end());
  return {std::move(seq), false};
}

Tour stitch_subtours(const MetricSpace& space, std::span<const Tour> subtours,
                     std::span<const PointId> cross) {
  EdgeSet g;
  PointSet all;
  for (const Tour& t : subtours) {
    for (std::size_t k = 0; k < t.num_transitions(); ++k) {
      const auto [a, b] = t.transition(k);
      if (a != b) g.push_back({a, b, space.dist(a, b)});
    }
    all.insert(all.end(), t.seq.begin(), t.seq.end());
  }
  all = sorted_copy(all);
  if (all.empty()) return {};
  const PointSet anchors = sorted_copy(cross);
  const EdgeSet tree = mst(space, anchors);
  g.insert(g.end(), tree.begin(), tree.end());
  fix_parity(space, g, tree, {});
  const PointId start = all.front();
  std::vector<PointId> walk = euler_walk(g, start);
  const PointSet reached = sorted_copy(walk);
  if (!std::includes(reached.begin(), reached.end(), all.begin(), all.end()))
    throw Disconnected("subtours are not connected through the cross points");
  if (walk.size() > 1) walk.pop_back();
  return {std::move(walk), true};
}

}  // namespace dtsp
