#include "cimsim/dataflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <queue>

namespace cimsim {

namespace {

struct Event {
  uint64_t t = 0;
  uint64_t seq = 0;
  int kind = 0;  // 0: ItemDone (queue engines), 1: PatchDone (barrier)
  int who = 0;   // instance id or duplicate handle
  int64_t image = 0;
  int64_t patch = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

struct Instance {
  int id = 0;
  int layer = 0;
  int block_id = 0;
  int grid_row = 0;
  int duplicate = 0;
  int width = 0;
  int pe = 0;
  uint64_t hop = 0;
  uint64_t busy = 0;
  uint64_t free_since = 0;
  bool idle = true;
  // Queue engines: item in flight.
  std::vector<int64_t> pending_psum;
  // Chunked per-instance cursor (pipelined layerwise).
  int64_t next_image = 0;
  int64_t cur_image = -1;
  int64_t cur_patch = 0;
  bool running = false;
};

// Barrier-mode duplicate: all blocks of the layer step through its patch
// chunk in lockstep.
struct DupState {
  int layer = 0;
  int k = 0;
  uint64_t hop_sum = 0;
  int64_t next_image = 0;
  int64_t cur_image = -1;
  int64_t cur_patch = 0;
  bool running = false;
};

struct LayerImage {
  bool admitted = false;
  bool complete = false;
  uint64_t complete_time = 0;
  int64_t patches_done = 0;
  std::vector<int32_t> outstanding;  // per patch, queue engines only
  std::vector<int64_t> psum_acc;     // functional: patches x cout
  std::vector<uint8_t> output;       // functional: one image's layer output
};

enum class Scheduling { barrier, pipelined_chunks, queues };

class Engine {
 public:
  Engine(const SimInputs& in, Dataflow flow) : in_(in), flow_(flow) {
    net_ = in.net;
    acfg_ = in.acfg;
    chip_ = in.chip;
    net_->validate();
    acfg_->validate();
    chip_->validate();
    in.trace->validate(*net_);

    functional_ = chip_->sim_mode == SimMode::functional;
    if (functional_ && (!in.weights || !in.quant))
      throw ValidationError("functional simulation needs weights and quant");

    maps_ = map_network(*net_, *acfg_);
    blocks_ = enumerate_blocks(*net_, *acfg_);
    L_ = static_cast<int>(net_->layers.size());
    layer_block_begin_.assign(static_cast<size_t>(L_) + 1, 0);
    for (const auto& b : blocks_)
      layer_block_begin_[static_cast<size_t>(b.layer_index) + 1] =
          b.block_id + 1;
    for (int l = 1; l <= L_; ++l)
      layer_block_begin_[static_cast<size_t>(l)] = std::max(
          layer_block_begin_[static_cast<size_t>(l)],
          layer_block_begin_[static_cast<size_t>(l) - 1]);

    if (in.allocation) {
      dup_per_block_ = in.allocation->per_block_duplicates(blocks_);
      policy_ = in.allocation->policy;
    } else {
      dup_per_block_.assign(blocks_.size(), 1);
      policy_ = chip_->allocation_policy;
    }

    if (flow_ == Dataflow::layerwise) {
      if (in.allocation && in.allocation->policy == AllocPolicy::block)
        throw ValidationError(
            "block allocation cannot drive the layerwise dataflow");
      sched_ = chip_->psum_pipelined ? Scheduling::pipelined_chunks
                                     : Scheduling::barrier;
      layer_dup_.assign(static_cast<size_t>(L_), 1);
      for (int l = 0; l < L_; ++l) {
        int d = dup_per_block_[static_cast<size_t>(
            layer_block_begin_[static_cast<size_t>(l)])];
        for (int g = layer_block_begin_[static_cast<size_t>(l)];
             g < layer_block_begin_[static_cast<size_t>(l) + 1]; ++g)
          if (dup_per_block_[static_cast<size_t>(g)] != d)
            throw ValidationError("layerwise dataflow needs uniform duplicates");
        layer_dup_[static_cast<size_t>(l)] = d;
      }
    } else {
      sched_ = Scheduling::queues;
    }

    images_ = chip_->pipeline_images > 0 ? chip_->pipeline_images
                                         : in.trace->images;
    if (chip_->warmup_images >= images_)
      throw ValidationError("warmup must leave at least one measured image");
    buffer_ = chip_->interlayer_buffer_images;

    build_instances();
    if (functional_) {
      wbits_.reserve(static_cast<size_t>(L_));
      for (int l = 0; l < L_; ++l)
        wbits_.push_back(build_weight_bits((*in.weights)[static_cast<size_t>(l)],
                                           maps_[static_cast<size_t>(l)],
                                           *acfg_));
    }
  }

  SimReport run();

 private:
  int blocks_in_layer(int l) const {
    return layer_block_begin_[static_cast<size_t>(l) + 1] -
           layer_block_begin_[static_cast<size_t>(l)];
  }
  int64_t patches(int l) const {
    return maps_[static_cast<size_t>(l)].patches_per_image;
  }

  void build_instances() {
    int64_t demand = 0;
    for (size_t g = 0; g < blocks_.size(); ++g)
      demand += int64_t(dup_per_block_[g]) * blocks_[g].width_arrays;
    int64_t budget = int64_t(chip_->pe_count) * acfg_->arrays_per_pe;
    if (demand > budget)
      throw CapacityError("allocation needs " + std::to_string(demand) +
                          " arrays, chip has " + std::to_string(budget));

    identity_begin_.assign(blocks_.size() + 1, 0);
    for (size_t g = 0; g < blocks_.size(); ++g) {
      identity_begin_[g + 1] = identity_begin_[g] + dup_per_block_[g];
      for (int k = 0; k < dup_per_block_[g]; ++k) {
        Instance inst;
        inst.id = static_cast<int>(instances_.size());
        inst.layer = blocks_[g].layer_index;
        inst.block_id = blocks_[g].block_id;
        inst.grid_row = blocks_[g].grid_row;
        inst.duplicate = k;
        inst.width = blocks_[g].width_arrays;
        instances_.push_back(std::move(inst));
      }
    }
    std::vector<int> widths;
    widths.reserve(instances_.size());
    for (const auto& i : instances_) widths.push_back(i.width);
    std::vector<int> pes = place_on_pes(widths, *acfg_, *chip_);
    int side = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(chip_->pe_count))));
    for (size_t i = 0; i < instances_.size(); ++i) {
      instances_[i].pe = pes[i];
      instances_[i].hop =
          static_cast<uint64_t>(pes[i] % side + pes[i] / side + 1);
    }
  }

  // Chunk of patches owned by duplicate k of a layer; remainder patches go
  // to the lowest-indexed duplicates.
  std::pair<int64_t, int64_t> chunk(int l, int k) const {
    int64_t p = patches(l);
    int64_t d = layer_dup_[static_cast<size_t>(l)];
    int64_t size = p / d;
    int64_t rem = p % d;
    int64_t begin = k * size + std::min<int64_t>(k, rem);
    int64_t end = begin + size + (k < rem ? 1 : 0);
    return {begin, end};
  }

  const uint8_t* layer_input(int l, int64_t m) const {
    if (l == 0 || chip_->sim_mode == SimMode::timing)
      return in_.trace->image_data(l, m);
    return state_[static_cast<size_t>(l) - 1][static_cast<size_t>(m)]
        .output.data();
  }

  void fill_scratch(int l, int64_t m, int64_t p) {
    const LayerMapping& map = maps_[static_cast<size_t>(l)];
    int64_t padded = int64_t(map.grid_rows) * acfg_->array_rows;
    if (static_cast<int64_t>(scratch_.size()) < padded)
      scratch_.resize(static_cast<size_t>(padded));
    std::memset(scratch_.data() + map.matrix_rows, 0,
                static_cast<size_t>(padded - map.matrix_rows));
    fill_patch(net_->layers[static_cast<size_t>(l)], layer_input(l, m), p,
               scratch_.data());
  }

  // Executes block g's slice of the already-filled scratch patch. Returns
  // cycles; leaves the psum in psum_out when functional.
  uint64_t exec_block(int g, std::vector<int64_t>* psum_out) {
    const Block& b = blocks_[static_cast<size_t>(g)];
    BitPlanes planes = build_bitplanes(
        scratch_.data() + int64_t(b.grid_row) * acfg_->array_rows,
        acfg_->array_rows, acfg_->input_bits);
    if (functional_ && psum_out) {
      BlockResult r =
          block_execute(b, planes, wbits_[static_cast<size_t>(b.layer_index)],
                        chip_->mode, *acfg_);
      *psum_out = std::move(r.psum);
      return r.cycles;
    }
    return block_cycles(planes, chip_->mode, *acfg_).cycles;
  }

  void push_event(uint64_t t, int kind, int who, int64_t m, int64_t p) {
    eq_.push(Event{t, seq_++, kind, who, m, p});
  }

  // A layer may begin image m once its input is complete and its output
  // boundary is not full. The boundary holds up to `buffer_` completed
  // images waiting for the consumer, plus the one being produced (partial
  // sums stage in the accumulators until then).
  bool can_admit(int l, int64_t m) const {
    if (m >= images_) return false;
    if (l > 0 &&
        !state_[static_cast<size_t>(l) - 1][static_cast<size_t>(m)].complete)
      return false;
    int64_t blocker = m - buffer_ - 1;
    if (l + 1 < L_ && blocker >= 0 &&
        !state_[static_cast<size_t>(l) + 1][static_cast<size_t>(blocker)]
             .complete)
      return false;
    return true;
  }

  void try_admit(int l, uint64_t t) {
    if (l < 0 || l >= L_) return;
    while (can_admit(l, next_admit_[static_cast<size_t>(l)])) {
      int64_t m = next_admit_[static_cast<size_t>(l)]++;
      admit(l, m, t);
    }
  }

  void admit(int l, int64_t m, uint64_t t) {
    LayerImage& s = state_[static_cast<size_t>(l)][static_cast<size_t>(m)];
    s.admitted = true;
    int64_t np = patches(l);
    int64_t cout = net_->layers[static_cast<size_t>(l)].out_channels();
    if (functional_) {
      s.psum_acc.assign(static_cast<size_t>(np * cout), 0);
      s.output.assign(
          static_cast<size_t>(
              net_->layers[static_cast<size_t>(l)].output_elems()),
          0);
    }
    if (sched_ != Scheduling::barrier)
      s.outstanding.assign(static_cast<size_t>(np),
                           blocks_in_layer(l));
    switch (sched_) {
      case Scheduling::queues:
        for (int g = layer_block_begin_[static_cast<size_t>(l)];
             g < layer_block_begin_[static_cast<size_t>(l) + 1]; ++g) {
          auto& q = queues_[static_cast<size_t>(g)];
          for (int64_t p = 0; p < np; ++p) q.push_back({m, p});
          dispatch_idle(g, t);
        }
        break;
      case Scheduling::barrier:
        for (int k = 0; k < layer_dup_[static_cast<size_t>(l)]; ++k)
          kick_dup(dup_base_[static_cast<size_t>(l)] + k, t);
        break;
      case Scheduling::pipelined_chunks:
        for (int g = layer_block_begin_[static_cast<size_t>(l)];
             g < layer_block_begin_[static_cast<size_t>(l) + 1]; ++g)
          for (int i = identity_begin_[static_cast<size_t>(g)];
               i < identity_begin_[static_cast<size_t>(g) + 1]; ++i)
            kick_instance(instances_[static_cast<size_t>(i)], t);
        break;
    }
  }

  // --- queue scheduling -----------------------------------------------

  void dispatch_idle(int g, uint64_t t) {
    auto& q = queues_[static_cast<size_t>(g)];
    while (!q.empty()) {
      int best = -1;
      uint64_t best_free = 0;
      for (int i = identity_begin_[static_cast<size_t>(g)];
           i < identity_begin_[static_cast<size_t>(g) + 1]; ++i) {
        const Instance& inst = instances_[static_cast<size_t>(i)];
        if (!inst.idle) continue;
        if (best < 0 || inst.free_since < best_free) {
          best = i;
          best_free = inst.free_since;
        }
      }
      if (best < 0) return;
      auto item = q.front();
      q.pop_front();
      dispatch_item(instances_[static_cast<size_t>(best)], item.first,
                    item.second, t);
    }
  }

  void dispatch_item(Instance& inst, int64_t m, int64_t p, uint64_t t) {
    fill_scratch(inst.layer, m, p);
    uint64_t c = exec_block(inst.block_id, &inst.pending_psum);
    inst.busy += c;
    inst.idle = false;
    input_packets_ += 1;
    hops_ += inst.hop;
    push_event(t + c, 0, inst.id, m, p);
  }

  void on_item_done(Instance& inst, int64_t m, int64_t p, uint64_t t) {
    int l = inst.layer;
    psum_packets_ += 1;
    hops_ += inst.hop;
    LayerImage& s = state_[static_cast<size_t>(l)][static_cast<size_t>(m)];
    if (functional_) {
      int64_t cout = net_->layers[static_cast<size_t>(l)].out_channels();
      int64_t* acc = s.psum_acc.data() + p * cout;
      for (int64_t c = 0; c < cout; ++c) acc[c] += inst.pending_psum[c];
    }
    if (--s.outstanding[static_cast<size_t>(p)] == 0) finalize_patch(l, m, p, t);

    if (sched_ == Scheduling::queues) {
      auto& q = queues_[static_cast<size_t>(inst.block_id)];
      if (!q.empty()) {
        auto item = q.front();
        q.pop_front();
        dispatch_item(inst, item.first, item.second, t);
      } else {
        inst.idle = true;
        inst.free_since = t;
      }
    } else {
      advance_instance(inst, t);
    }
  }

  // --- pipelined chunk scheduling ---------------------------------------

  void kick_instance(Instance& inst, uint64_t t) {
    while (!inst.running) {
      int64_t m = inst.next_image;
      if (m >= images_ ||
          !state_[static_cast<size_t>(inst.layer)][static_cast<size_t>(m)]
               .admitted)
        return;
      auto [begin, end] = chunk(inst.layer, inst.duplicate);
      if (begin == end) {
        inst.next_image++;
        continue;
      }
      inst.running = true;
      inst.cur_image = m;
      inst.cur_patch = begin;
      inst.idle = false;
      dispatch_item(inst, m, begin, t);
    }
  }

  void advance_instance(Instance& inst, uint64_t t) {
    auto [begin, end] = chunk(inst.layer, inst.duplicate);
    inst.cur_patch++;
    if (inst.cur_patch < end) {
      dispatch_item(inst, inst.cur_image, inst.cur_patch, t);
      return;
    }
    inst.running = false;
    inst.idle = true;
    inst.free_since = t;
    inst.next_image++;
    kick_instance(inst, t);
  }

  // --- barrier scheduling ------------------------------------------------

  void kick_dup(int handle, uint64_t t) {
    DupState& d = dups_[static_cast<size_t>(handle)];
    while (!d.running) {
      int64_t m = d.next_image;
      if (m >= images_ ||
          !state_[static_cast<size_t>(d.layer)][static_cast<size_t>(m)]
               .admitted)
        return;
      auto [begin, end] = chunk(d.layer, d.k);
      if (begin == end) {
        d.next_image++;
        continue;
      }
      d.running = true;
      d.cur_image = m;
      d.cur_patch = begin;
      start_patch(handle, t);
    }
  }

  void start_patch(int handle, uint64_t t) {
    DupState& d = dups_[static_cast<size_t>(handle)];
    int l = d.layer;
    int64_t m = d.cur_image;
    fill_scratch(l, m, d.cur_patch);
    LayerImage& s = state_[static_cast<size_t>(l)][static_cast<size_t>(m)];
    int64_t cout = net_->layers[static_cast<size_t>(l)].out_channels();
    uint64_t tmax = 0;
    for (int g = layer_block_begin_[static_cast<size_t>(l)];
         g < layer_block_begin_[static_cast<size_t>(l) + 1]; ++g) {
      Instance& inst =
          instances_[static_cast<size_t>(identity_begin_[static_cast<size_t>(g)] + d.k)];
      std::vector<int64_t> psum;
      uint64_t c = exec_block(g, &psum);
      inst.busy += c;
      tmax = std::max(tmax, c);
      if (functional_) {
        int64_t* acc = s.psum_acc.data() + d.cur_patch * cout;
        for (int64_t cc = 0; cc < cout; ++cc) acc[cc] += psum[cc];
      }
    }
    input_packets_ += static_cast<uint64_t>(blocks_in_layer(l));
    hops_ += d.hop_sum;
    push_event(t + tmax, 1, handle, m, d.cur_patch);
  }

  void on_patch_done(int handle, int64_t m, int64_t p, uint64_t t) {
    DupState& d = dups_[static_cast<size_t>(handle)];
    int l = d.layer;
    psum_packets_ += static_cast<uint64_t>(blocks_in_layer(l));
    hops_ += d.hop_sum;
    finalize_patch(l, m, p, t);
    auto [begin, end] = chunk(l, d.k);
    d.cur_patch++;
    if (d.cur_patch < end) {
      start_patch(handle, t);
      return;
    }
    d.running = false;
    d.next_image++;
    kick_dup(handle, t);
  }

  // --- completion ---------------------------------------------------------

  void finalize_patch(int l, int64_t m, int64_t p, uint64_t t) {
    LayerImage& s = state_[static_cast<size_t>(l)][static_cast<size_t>(m)];
    if (functional_) {
      int64_t cout = net_->layers[static_cast<size_t>(l)].out_channels();
      const QuantParams& q = (*in_.quant)[static_cast<size_t>(l)];
      const int64_t* acc = s.psum_acc.data() + p * cout;
      uint8_t* out = s.output.data() + p * cout;
      for (int64_t c = 0; c < cout; ++c)
        out[c] = vector_unit_finalize(acc[c], q);
    }
    if (++s.patches_done == patches(l)) complete_image(l, m, t);
  }

  void complete_image(int l, int64_t m, uint64_t t) {
    LayerImage& s = state_[static_cast<size_t>(l)][static_cast<size_t>(m)];
    s.complete = true;
    s.complete_time = t;
    s.psum_acc.clear();
    s.psum_acc.shrink_to_fit();
    s.outstanding.clear();
    s.outstanding.shrink_to_fit();
    if (functional_ && l > 0) {
      // Upstream output fully consumed.
      LayerImage& up =
          state_[static_cast<size_t>(l) - 1][static_cast<size_t>(m)];
      up.output.clear();
      up.output.shrink_to_fit();
    }
    try_admit(l + 1, t);
    try_admit(l - 1, t);
  }

  // --- members -------------------------------------------------------------

  const SimInputs& in_;
  Dataflow flow_;
  const NetworkSpec* net_ = nullptr;
  const ArrayConfig* acfg_ = nullptr;
  const ChipConfig* chip_ = nullptr;
  bool functional_ = false;
  Scheduling sched_ = Scheduling::barrier;
  AllocPolicy policy_ = AllocPolicy::weight;

  std::vector<LayerMapping> maps_;
  std::vector<Block> blocks_;
  std::vector<int> layer_block_begin_;
  std::vector<int> dup_per_block_;
  std::vector<int> layer_dup_;
  std::vector<Instance> instances_;
  std::vector<int> identity_begin_;
  std::vector<LayerWeightBits> wbits_;
  int L_ = 0;
  int64_t images_ = 0;
  int buffer_ = 1;

  std::vector<std::vector<LayerImage>> state_;
  std::vector<int64_t> next_admit_;
  std::vector<std::deque<std::pair<int64_t, int64_t>>> queues_;
  std::vector<DupState> dups_;
  std::vector<int> dup_base_;

  std::priority_queue<Event, std::vector<Event>, EventLater> eq_;
  uint64_t seq_ = 0;
  uint64_t psum_packets_ = 0, input_packets_ = 0, hops_ = 0;
  std::vector<uint8_t> scratch_;
};

SimReport Engine::run() {
  state_.assign(static_cast<size_t>(L_), {});
  for (auto& v : state_) v.resize(static_cast<size_t>(images_));
  next_admit_.assign(static_cast<size_t>(L_), 0);
  if (sched_ == Scheduling::queues) {
    queues_.resize(blocks_.size());
  } else if (sched_ == Scheduling::barrier) {
    dup_base_.assign(static_cast<size_t>(L_), 0);
    for (int l = 0; l < L_; ++l) {
      dup_base_[static_cast<size_t>(l)] = static_cast<int>(dups_.size());
      for (int k = 0; k < layer_dup_[static_cast<size_t>(l)]; ++k) {
        DupState d;
        d.layer = l;
        d.k = k;
        for (int g = layer_block_begin_[static_cast<size_t>(l)];
             g < layer_block_begin_[static_cast<size_t>(l) + 1]; ++g)
          d.hop_sum += instances_[static_cast<size_t>(
                                      identity_begin_[static_cast<size_t>(g)] + k)]
                           .hop;
        dups_.push_back(d);
      }
    }
  }

  for (int l = 0; l < L_; ++l) try_admit(l, 0);

  while (!eq_.empty()) {
    Event ev = eq_.top();
    eq_.pop();
    if (ev.kind == 0)
      on_item_done(instances_[static_cast<size_t>(ev.who)], ev.image, ev.patch,
                   ev.t);
    else
      on_patch_done(ev.who, ev.image, ev.patch, ev.t);
  }

  for (int l = 0; l < L_; ++l)
    for (int64_t m = 0; m < images_; ++m)
      if (!state_[static_cast<size_t>(l)][static_cast<size_t>(m)].complete)
        throw InternalError("scoreboard violation: layer " +
                            std::to_string(l) + " image " + std::to_string(m) +
                            " incomplete");

  SimReport rep;
  rep.network_name = net_->name;
  rep.policy = policy_;
  rep.dataflow = flow_;
  rep.mode = chip_->mode;
  rep.sim_mode = chip_->sim_mode;
  rep.pe_count = chip_->pe_count;
  rep.images = images_;
  rep.warmup_images = chip_->warmup_images;
  rep.duplicates_per_block = dup_per_block_;

  const auto& last = state_[static_cast<size_t>(L_) - 1];
  rep.makespan_cycles = last[static_cast<size_t>(images_) - 1].complete_time;
  rep.warm_end_cycles =
      chip_->warmup_images > 0
          ? last[static_cast<size_t>(chip_->warmup_images) - 1].complete_time
          : 0;
  rep.window_cycles = rep.makespan_cycles - rep.warm_end_cycles;
  int64_t measured = images_ - chip_->warmup_images;
  rep.throughput_images_per_s =
      rep.window_cycles > 0
          ? static_cast<double>(measured) * acfg_->clock_hz /
                static_cast<double>(rep.window_cycles)
          : 0.0;

  rep.instances.reserve(instances_.size());
  for (const auto& inst : instances_) {
    InstanceReport ir;
    ir.id = inst.id;
    ir.layer = inst.layer;
    ir.block_id = inst.block_id;
    ir.duplicate = inst.duplicate;
    ir.pe = inst.pe;
    ir.width = inst.width;
    ir.busy_cycles = inst.busy;
    ir.stall_cycles = rep.makespan_cycles - inst.busy;
    rep.instances.push_back(ir);
  }
  rep.layers.assign(static_cast<size_t>(L_), LayerReport{});
  std::vector<double> busy_weighted(static_cast<size_t>(L_), 0.0);
  std::vector<int64_t> arrays(static_cast<size_t>(L_), 0);
  for (const auto& inst : instances_) {
    auto l = static_cast<size_t>(inst.layer);
    rep.layers[l].instances += 1;
    rep.layers[l].busy_cycles += inst.busy;
    busy_weighted[l] += static_cast<double>(inst.busy) * inst.width;
    arrays[l] += inst.width;
  }
  for (int l = 0; l < L_; ++l) {
    auto& lr = rep.layers[static_cast<size_t>(l)];
    lr.layer = l;
    lr.arrays = arrays[static_cast<size_t>(l)];
    lr.utilization =
        rep.makespan_cycles > 0 && lr.arrays > 0
            ? busy_weighted[static_cast<size_t>(l)] /
                  (static_cast<double>(lr.arrays) *
                   static_cast<double>(rep.makespan_cycles))
            : 0.0;
  }
  rep.psum_packets = psum_packets_;
  rep.input_packets = input_packets_;
  rep.total_hops = hops_;

  if (functional_) {
    uint64_t h = kFnvOffset;
    rep.final_activations.reserve(static_cast<size_t>(images_));
    for (int64_t m = 0; m < images_; ++m) {
      auto& out = state_[static_cast<size_t>(L_) - 1][static_cast<size_t>(m)]
                      .output;
      h = fnv1a64(out.data(), out.size(), h);
      rep.final_activations.push_back(std::move(out));
    }
    rep.activations_checksum = to_hex(h);
  }
  return rep;
}

}  // namespace

SimReport run_layerwise(const SimInputs& in) {
  Engine engine(in, Dataflow::layerwise);
  return engine.run();
}

SimReport run_blockwise(const SimInputs& in) {
  Engine engine(in, Dataflow::blockwise);
  return engine.run();
}

SimReport simulate(const SimInputs& in) {
  return in.chip->dataflow == Dataflow::layerwise ? run_layerwise(in)
                                                  : run_blockwise(in);
}

}  // namespace cimsim
