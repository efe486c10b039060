#include "dtsp/nets.hpp"

#include <algorithm>
#include <climits>
#include <limits>
#include <cmath>
#include <random>

#include "dtsp/errors.hpp"

namespace dtsp {

int level_for(double value, double base) {
  if (!(value > 0.0)) return INT_MIN / 2;
  int i = static_cast<int>(std::floor(std::log(value) / std::log(base)));
  // Correct floating drift in either direction.
  while (std::pow(base, i + 1) <= value * (1.0 + kRadiusTol)) ++i;
  while (std::pow(base, i) > value * (1.0 + kRadiusTol)) --i;
  return i;
}

namespace {

std::vector<PointId> nearest_covers(const MetricSpace& space,
                                    const PointSet& net) {
  std::vector<PointId> cover(space.size());
  for (PointId p = 0; p < space.size(); ++p) {
    PointId best = net.front();
    double best_d = space.dist(p, best);
    for (PointId u : net) {
      const double d = space.dist(p, u);
      if (d < best_d || (d == best_d && u < best)) {
        best = u;
        best_d = d;
      }
    }
    cover[p] = best;
  }
  return cover;
}

}  // namespace

NetHierarchy::NetHierarchy(const MetricSpace& space, double s,
                           std::vector<PointSet> nets)
    : s_(s), nets_(std::move(nets)) {
  for (auto& level : nets_) std::sort(level.begin(), level.end());
  top_level_.assign(space.size(), -1);
  cover_.reserve(nets_.size());
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    for (PointId p : nets_[i]) top_level_[p] = static_cast<int>(i);
    if (nets_[i].empty())
      cover_.emplace_back(space.size(), PointId(0));
    else
      cover_.push_back(nearest_covers(space, nets_[i]));
  }
}

double NetHierarchy::radius(int level) const { return std::pow(s_, level); }

const PointSet& NetHierarchy::net(int level) const {
  return nets_[std::clamp(level, 0, top())];
}

bool NetHierarchy::contains(int level, PointId p) const {
  if (level <= 0) return true;
  if (level > top()) level = top();
  return top_level_[p] >= level;
}

PointId NetHierarchy::cover(PointId p, int level) const {
  if (level <= 0) return p;
  return cover_[std::min(level, top())][p];
}

std::vector<NetPointCopy> NetHierarchy::copies(PointId p) const {
  std::vector<NetPointCopy> out;
  for (int i = 0; i <= top_level_[p]; ++i) out.push_back({p, i});
  return out;
}

NetHierarchy build_hierarchy(const MetricSpace& space, double s) {
  if (!(s >= 4.0)) throw BadScale("net hierarchy needs s >= 4");
  const auto n = static_cast<PointId>(space.size());
  if (n == 0) throw DegenerateInstance("empty instance");
  const double diam = space.diameter();
  int top = 0;
  while (std::pow(s, top) < diam * (1.0 - kRadiusTol)) ++top;

  std::vector<PointSet> nets(top + 1);
  nets[top] = {0};
  for (int i = top; i >= 1; --i) {
    PointSet next = nets[i];
    if (i - 1 == 0) {
      next = space.all_points();
    } else {
      const double r = std::pow(s, i - 1);
      for (PointId p = 0; p < n; ++p) {
        bool covered = false;
        for (PointId u : next)
          if (within(space.dist(p, u), r)) {
            covered = true;
            break;
          }
        if (!covered) next.push_back(p);
      }
      std::sort(next.begin(), next.end());
    }
    nets[i - 1] = std::move(next);
  }
  if (top == 0) nets[0] = space.all_points();
  return NetHierarchy(space, s, std::move(nets));
}

NetReport verify_nets(const MetricSpace& space, const NetHierarchy& h,
                      double ddim_upper, std::size_t audit_balls,
                      std::uint64_t seed) {
  NetReport rep;
  const auto n = static_cast<PointId>(space.size());
  auto fail = [&](std::string msg) {
    rep.pass = false;
    rep.violations.push_back(std::move(msg));
  };
  if (h.net(0).size() != n) fail("H_0 does not contain every point");
  if (h.net(h.top()).size() != 1) fail("top net is not a single point");

  std::mt19937_64 rng(seed);
  const double diam = space.diameter();
  for (int i = 0; i <= h.top(); ++i) {
    const PointSet& net = h.net(i);
    const double r = h.radius(i);
    rep.level_sizes.push_back(net.size());
    for (std::size_t a = 0; a < net.size(); ++a)
      for (std::size_t b = a + 1; b < net.size(); ++b) {
        const double d = space.dist(net[a], net[b]);
        const bool bad = i == 0 ? d < r * (1.0 - kRadiusTol) : within(d, r);
        if (bad)
          fail("packing: level " + std::to_string(i) + " points " +
               std::to_string(net[a]) + "," + std::to_string(net[b]));
      }
    for (PointId p = 0; p < n; ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (PointId u : net) best = std::min(best, space.dist(p, u));
      if (!within(best, r))
        fail("covering: level " + std::to_string(i) + " point " +
             std::to_string(p));
      if (!net.empty() && !within(space.dist(p, h.cover(p, i)), r))
        fail("designated cover too far: level " + std::to_string(i) +
             " point " + std::to_string(p));
    }
    if (i >= 1)
      for (PointId u : net)
        if (!std::binary_search(h.net(i - 1).begin(), h.net(i - 1).end(), u))
          fail("nesting: level " + std::to_string(i) + " point " +
               std::to_string(u));

    // Packing-count bound on sampled balls.
    if (n == 0 || net.empty()) continue;
    std::uniform_int_distribution<PointId> pick(0, n - 1);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (std::size_t t = 0; t < audit_balls; ++t) {
      const PointId x = pick(rng);
      const double R = r + frac(rng) * std::max(diam, r);
      const PointSet members = ball_within(space, net, x, R);
      ++rep.packing_balls_checked;
      if (members.size() < 2) continue;
      const double alpha = min_distance_of(space, members);
      const double d = diameter_of(space, members);
      const double bound = std::pow(2.0 * d / alpha, ddim_upper);
      const double ball_bound = std::pow(2.0 * (2.0 * R + r) / r, ddim_upper);
      if (double(members.size()) > bound * (1.0 + 1e-9) ||
          double(members.size()) > ball_bound * (1.0 + 1e-9))
        fail("packing count: level " + std::to_string(i) + " ball at " +
             std::to_string(x) + " holds " + std::to_string(members.size()));
    }
  }
  return rep;
}

}  // namespace dtsp
