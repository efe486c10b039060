#include "dtsp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "dtsp/errors.hpp"

namespace dtsp {

RadiusDistribution::RadiusDistribution(double a, double ddim)
    : a_(a), ddim_(ddim) {
  if (!(a > 0.0)) throw ConfigError("radius scale must be positive");
  if (!(ddim >= 1.0)) throw ConfigError("ddim must be at least 1");
  rate_ = 8.0 * ddim * std::log(2.0) / a;
  norm_ = -std::expm1(-8.0 * ddim * std::log(2.0));  // 1 - 2^{-8 ddim}
}

double RadiusDistribution::pdf(double r) const {
  if (r < a_ || r > 2.0 * a_) return 0.0;
  return rate_ * std::exp(-rate_ * (r - a_)) / norm_;
}

double RadiusDistribution::cdf(double r) const {
  if (r <= a_) return 0.0;
  if (r >= 2.0 * a_) return 1.0;
  return -std::expm1(-rate_ * (r - a_)) / norm_;
}

double RadiusDistribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  const double r = a_ - std::log1p(-u * norm_) / rate_;
  return std::clamp(r, a_, 2.0 * a_);
}

double RadiusDistribution::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return cdf(hi) - cdf(lo);
}

double sample_radius(double a, double ddim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return RadiusDistribution(a, ddim).quantile(u(rng));
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(splitmix(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double keyed_uniform(std::uint64_t seed, int level, PointId center,
                     std::uint32_t guess, std::uint32_t attempt) {
  std::uint64_t x = splitmix(seed);
  x = splitmix(x ^ std::uint64_t(std::uint32_t(level)));
  x = splitmix(x ^ center);
  x = splitmix(x ^ (std::uint64_t(guess) << 32 | attempt));
  return double(x >> 11) * 0x1.0p-53;
}

double keyed_radius(const NetHierarchy& h, int level, PointId center,
                    const PartitionParams& params, std::uint32_t attempt) {
  const RadiusDistribution dist(h.radius(level), params.ddim);
  return dist.quantile(
      keyed_uniform(params.seed, level, center, params.guess, attempt));
}

std::size_t SingleScalePartition::cluster_of(PointId p) const {
  for (std::size_t k = 0; k < clusters.size(); ++k)
    if (std::binary_search(clusters[k].members.begin(),
                           clusters[k].members.end(), p))
      return k;
  return clusters.size();
}

SingleScalePartition single_scale_partition(const MetricSpace& space,
                                            const NetHierarchy& h,
                                            std::span<const PointId> subset,
                                            int level,
                                            const PartitionParams& params,
                                            const RadiusFilter& filter) {
  SingleScalePartition out;
  out.level = level;
  PointSet pending(subset.begin(), subset.end());
  std::sort(pending.begin(), pending.end());
  const double a = h.radius(level);
  const auto starve = static_cast<std::uint32_t>(
      64.0 * std::max(1.0, std::log(double(std::max<std::size_t>(space.size(), 2)))));

  for (PointId u : h.net(level)) {
    if (pending.empty()) break;
    bool relevant = false;
    for (PointId p : pending)
      if (within(space.dist(u, p), 2.0 * a)) {
        relevant = true;
        break;
      }
    if (!relevant) continue;

    std::uint32_t attempt = 0;
    double r = keyed_radius(h, level, u, params, attempt);
    if (filter)
      while (!filter(u, r)) {
        ++out.resamples;
        if (++attempt >= starve)
          throw FilterStarvation("radius filter rejected " +
                                 std::to_string(attempt) +
                                 " draws for center " + std::to_string(u) +
                                 " at level " + std::to_string(level));
        r = keyed_radius(h, level, u, params, attempt);
      }

    Cluster c{u, r, {}};
    PointSet rest;
    for (PointId p : pending)
      (within(space.dist(u, p), r) ? c.members : rest).push_back(p);
    pending = std::move(rest);
    if (!c.members.empty()) out.clusters.push_back(std::move(c));
  }
  if (!pending.empty())
    throw Infeasible("level " + std::to_string(level) +
                     " partition left points unassigned; hierarchy is not a net");
  return out;
}

std::size_t ClusterTree::max_children() const {
  std::size_t best = 0;
  for (const auto& n : nodes) best = std::max(best, n.children.size());
  return best;
}

std::vector<std::size_t> ClusterTree::at_level(int level) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k].level == level) out.push_back(k);
  return out;
}

ClusterTree hierarchical_clustering(const MetricSpace& space,
                                    const NetHierarchy& h,
                                    const PartitionParams& params,
                                    const LevelFilters& filters) {
  ClusterTree tree;
  const int top = h.top();
  tree.nodes.push_back({top, h.net(top).front(), h.radius(top),
                        space.all_points(), {}});
  // Breadth-first so nodes of one level are contiguous.
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].level <= 0) continue;
    const int child_level = tree.nodes[k].level - 1;
    const RadiusFilter filter = filters ? filters(child_level) : RadiusFilter{};
    const PointSet members = tree.nodes[k].members;
    SingleScalePartition part =
        single_scale_partition(space, h, members, child_level, params, filter);
    for (Cluster& c : part.clusters) {
      tree.nodes[k].children.push_back(tree.nodes.size());
      tree.nodes.push_back({child_level, c.center, c.radius, std::move(c.members), {}});
    }
  }
  return tree;
}

double estimate_cut_probability(const MetricSpace& space, const NetHierarchy& h,
                                PointId u, PointId v, int level, double ddim,
                                std::size_t trials, std::uint64_t seed,
                                unsigned threads) {
  if (u == v || trials == 0) return 0.0;
  const PointSet pair{std::min(u, v), std::max(u, v)};
  auto run = [&](std::size_t from, std::size_t to) {
    std::size_t cuts = 0;
    for (std::size_t t = from; t < to; ++t) {
      const PartitionParams params{ddim, mix_seed(seed, t), 0};
      const auto part = single_scale_partition(space, h, pair, level, params);
      if (part.clusters.size() > 1) ++cuts;
    }
    return cuts;
  };
  std::size_t cuts = 0;
  if (threads <= 1) {
    cuts = run(0, trials);
  } else {
    std::vector<std::size_t> partial(threads, 0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        partial[w] = run(trials * w / threads, trials * (w + 1) / threads);
      });
    for (auto& th : pool) th.join();
    for (auto c : partial) cuts += c;
  }
  return double(cuts) / double(trials);
}

ValidRadiusSet::ValidRadiusSet(const MetricSpace& space, const NetHierarchy& h,
                               PointId u, int level, const Tour& t, double q,
                               double ddim)
    : lo_(h.radius(level)), hi_(2.0 * h.radius(level)), ddim_(ddim) {
  threshold_ = 9.0 * q * std::pow(2.0, 3.0 * ddim) * ddim;
  for (std::size_t k = 0; k < t.num_transitions(); ++k) {
    const auto [x, y] = t.transition(k);
    if (x == y || !within(space.dist(x, y), lo_)) continue;
    const double dx = space.dist(u, x), dy = space.dist(u, y);
    if (!within(dx, hi_) && !within(dy, hi_)) continue;
    spans_.emplace_back(std::min(dx, dy), std::max(dx, dy));
  }
}

std::size_t ValidRadiusSet::cut_count(double r) const {
  std::size_t n = 0;
  for (const auto& [near, far] : spans_)
    if (within(near, r) && !within(far, r)) ++n;
  return n;
}

double ValidRadiusSet::rejected_mass() const {
  std::vector<double> cuts{lo_, hi_};
  for (const auto& [near, far] : spans_) {
    if (near > lo_ && near < hi_) cuts.push_back(near);
    if (far > lo_ && far < hi_) cuts.push_back(far);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const RadiusDistribution dist(lo_, ddim_);
  double rejected = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    if (!accepts(mid)) rejected += dist.mass(cuts[k], cuts[k + 1]);
  }
  return rejected;
}

RadiusFilter valid_radius_filter(const MetricSpace& space,
                                 const NetHierarchy& h, int level,
                                 const Tour& t, double q, double ddim) {
  struct Cache {
    std::mutex lock;
    std::map<PointId, std::shared_ptr<ValidRadiusSet>> sets;
  };
  auto cache = std::make_shared<Cache>();
  return [&space, &h, level, t, q, ddim, cache](PointId u, double r) {
    std::shared_ptr<ValidRadiusSet> set;
    {
      std::lock_guard<std::mutex> g(cache->lock);
      auto& slot = cache->sets[u];
      if (!slot) slot = std::make_shared<ValidRadiusSet>(space, h, u, level, t, q, ddim);
      set = slot;
    }
    return set->accepts(r);
  };
}

}  // namespace dtsp
