#include "cimsim/alloc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace cimsim {

double Allocation::max_load_per_dup() const {
  double worst = 0.0;
  for (size_t i = 0; i < units.size(); ++i)
    worst = std::max(worst, units[i].load / duplicates[i]);
  return worst;
}

int Allocation::bottleneck_unit() const {
  int best = -1;
  double worst = -1.0;
  for (size_t i = 0; i < units.size(); ++i) {
    double r = units[i].load / duplicates[i];
    if (r > worst) {
      worst = r;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<int> Allocation::per_block_duplicates(
    const std::vector<Block>& blocks) const {
  std::vector<int> d(blocks.size(), 1);
  if (policy == AllocPolicy::block) {
    for (size_t i = 0; i < units.size(); ++i)
      d[static_cast<size_t>(units[i].block_id)] = duplicates[i];
  } else {
    std::vector<int> per_layer;
    for (size_t i = 0; i < units.size(); ++i) {
      int li = units[i].layer_index;
      if (li >= static_cast<int>(per_layer.size()))
        per_layer.resize(static_cast<size_t>(li) + 1, 1);
      per_layer[static_cast<size_t>(li)] = duplicates[i];
    }
    for (size_t b = 0; b < blocks.size(); ++b)
      d[b] = per_layer[static_cast<size_t>(blocks[b].layer_index)];
  }
  return d;
}

namespace {

// Highest load/d, ties to the lowest unit id.
int argmax_ratio(const std::vector<AllocUnit>& units,
                 const std::vector<int>& d) {
  int best = 0;
  double best_ratio = units[0].load / d[0];
  for (size_t i = 1; i < units.size(); ++i) {
    double r = units[i].load / d[i];
    if (r > best_ratio) {
      best_ratio = r;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

Allocation allocate_greedy(const std::vector<AllocUnit>& units, int64_t budget,
                           bool fill_remainder) {
  if (units.empty()) throw ValidationError("allocation with no units");
  for (const auto& u : units) {
    if (u.cost < 1) throw ValidationError("unit cost must be >= 1");
    if (!(u.load > 0)) throw ValidationError("unit load must be positive");
  }
  int64_t base = 0;
  for (const auto& u : units) base += u.cost;
  if (base > budget)
    throw CapacityError("base copy needs " + std::to_string(base) +
                        " arrays, budget is " + std::to_string(budget));

  Allocation a;
  a.units = units;
  a.duplicates.assign(units.size(), 1);
  a.arrays_budget = budget;
  int64_t remaining = budget - base;

  for (;;) {
    int u = argmax_ratio(units, a.duplicates);
    if (units[static_cast<size_t>(u)].cost <= remaining) {
      a.duplicates[static_cast<size_t>(u)] += 1;
      remaining -= units[static_cast<size_t>(u)].cost;
      continue;
    }
    if (!fill_remainder) break;
    // Walk down the load/d order for the first unit that still fits.
    std::vector<size_t> order(units.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return units[x].load / a.duplicates[x] > units[y].load / a.duplicates[y];
    });
    bool advanced = false;
    for (size_t i : order) {
      if (units[i].cost <= remaining) {
        a.duplicates[i] += 1;
        remaining -= units[i].cost;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  a.arrays_used = budget - remaining;
  return a;
}

Allocation allocate(const NetworkSpec& net,
                    const std::vector<LayerMapping>& maps,
                    const std::vector<Block>& blocks, const CostModel* cost,
                    AllocPolicy policy, const ArrayConfig& cfg,
                    const ChipConfig& chip) {
  if (policy != AllocPolicy::weight && !cost)
    throw ValidationError("this allocation policy needs a cost model");
  int64_t budget = int64_t(chip.pe_count) * cfg.arrays_per_pe;
  std::vector<AllocUnit> units;
  if (policy == AllocPolicy::block) {
    units.reserve(blocks.size());
    for (const auto& b : blocks) {
      AllocUnit u;
      u.id = b.block_id;
      u.layer_index = b.layer_index;
      u.block_id = b.block_id;
      u.cost = b.width_arrays;
      const BlockStats& bs = cost->blocks[static_cast<size_t>(b.block_id)];
      u.load = static_cast<double>(maps[static_cast<size_t>(b.layer_index)]
                                       .patches_per_image) *
               bs.expected_cycles;
      units.push_back(u);
    }
  } else {
    units.reserve(net.layers.size());
    for (size_t li = 0; li < net.layers.size(); ++li) {
      AllocUnit u;
      u.id = static_cast<int>(li);
      u.layer_index = static_cast<int>(li);
      u.cost = maps[li].arrays_total;
      // Weight policy: array share proportional to total MACs, i.e. the
      // greedy equalizes MACs per allocated array. Perf policy: equalize the
      // per-image latency of one copy under the per-patch barrier.
      u.load = policy == AllocPolicy::weight
                   ? static_cast<double>(net.layers[li].macs_per_image()) /
                         static_cast<double>(maps[li].arrays_total)
                   : cost->layers[li].barrier_cycles_per_image;
      units.push_back(u);
    }
  }
  Allocation a = allocate_greedy(units, budget, chip.fill_remainder);
  a.policy = policy;
  return a;
}

namespace {

struct BruteState {
  const std::vector<AllocUnit>* units;
  std::vector<int> d;
  std::vector<int> best_d;
  double best_max = std::numeric_limits<double>::infinity();
};

void brute_recurse(BruteState& st, size_t idx, int64_t remaining,
                   double max_so_far) {
  const auto& units = *st.units;
  if (max_so_far >= st.best_max) return;  // prune
  if (idx == units.size()) {
    st.best_max = max_so_far;
    st.best_d = st.d;
    return;
  }
  // Budget reserved for one copy of every later unit.
  int64_t reserve = 0;
  for (size_t i = idx + 1; i < units.size(); ++i) reserve += units[i].cost;
  int64_t max_d = (remaining - reserve) / units[idx].cost;
  for (int dd = 1; dd <= max_d; ++dd) {
    st.d[idx] = dd;
    double ratio = units[idx].load / dd;
    brute_recurse(st, idx + 1, remaining - int64_t(dd) * units[idx].cost,
                  std::max(max_so_far, ratio));
  }
}

}  // namespace

Allocation brute_force_allocate(const std::vector<AllocUnit>& units,
                                int64_t budget) {
  if (units.size() > 6 || budget > 32)
    throw ValidationError("brute-force allocator limited to 6 units, budget 32");
  if (units.empty()) throw ValidationError("allocation with no units");
  int64_t base = 0;
  for (const auto& u : units) base += u.cost;
  if (base > budget)
    throw CapacityError("base copy needs " + std::to_string(base) +
                        " arrays, budget is " + std::to_string(budget));

  BruteState st;
  st.units = &units;
  st.d.assign(units.size(), 1);
  brute_recurse(st, 0, budget, 0.0);

  Allocation a;
  a.units = units;
  a.duplicates = st.best_d;
  a.arrays_budget = budget;
  a.arrays_used = 0;
  for (size_t i = 0; i < units.size(); ++i)
    a.arrays_used += int64_t(a.duplicates[i]) * units[i].cost;
  return a;
}

}  // namespace cimsim
