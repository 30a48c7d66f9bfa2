#include "wirenn/imis/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace wirenn::imis {

Classifier hash_classifier(int n_classes, std::uint32_t seed) {
  if (n_classes < 1) throw std::invalid_argument("hash classifier needs at least one class");
  return [n_classes, seed](const flow::FiveTuple& key, std::span<const Prefix> prefixes, int n_real) {
    std::uint32_t h = flow::hash_tuple(key, seed);
    for (int i = 0; i < n_real; ++i) h = flow::murmur3_32(prefixes[static_cast<std::size_t>(i)], h);
    return ClassifierOutput{static_cast<int>(h % static_cast<std::uint32_t>(n_classes)), n_real >= kPrefixPackets};
  };
}

std::string_view to_string(OverflowPolicy p) noexcept { return p == OverflowPolicy::block ? "block" : "drop"; }
std::string_view to_string(PoolPolicy p) noexcept { return p == PoolPolicy::oldest_first ? "oldest" : "freshest"; }

std::optional<OverflowPolicy> parse_overflow_policy(std::string_view s) noexcept {
  if (s == "block") return OverflowPolicy::block;
  if (s == "drop") return OverflowPolicy::drop;
  return std::nullopt;
}

std::optional<PoolPolicy> parse_pool_policy(std::string_view s) noexcept {
  if (s == "oldest") return PoolPolicy::oldest_first;
  if (s == "freshest") return PoolPolicy::freshest_first;
  return std::nullopt;
}

std::uint64_t SimConfig::batch_latency(std::size_t b) const {
  if (!latency_by_batch.empty()) {
    if (b == 0 || b > latency_by_batch.size()) throw std::out_of_range("no latency entry for batch size " + std::to_string(b));
    return latency_by_batch[b - 1];
  }
  return infer_base_us + infer_per_flow_us * b;
}

void SimConfig::validate() const {
  if (ingress_capacity < 1 || pool_capacity < 1 || buffer_capacity < 1 || result_capacity < 1)
    throw std::invalid_argument("IMIS queue capacities must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("IMIS batch size must be >= 1");
  if (!latency_by_batch.empty() && latency_by_batch.size() < batch_size)
    throw std::invalid_argument("latency table must cover every batch size up to batch_size");
}

namespace {

enum Rank : int { kParser = 0, kPool = 1, kAnalyzer = 2, kBuffer = 3 };

enum class EventType { arrival, parser_wake, parser_done, pool_wake, pool_done, analyzer_wake, analyzer_done, analyzer_flush, buffer_wake, buffer_done };

struct Event {
  std::uint64_t time;
  int rank;
  std::uint64_t seq;
  EventType type;
  std::uint64_t arg;

  bool operator>(const Event& o) const noexcept {
    if (time != o.time) return time > o.time;
    if (rank != o.rank) return rank > o.rank;
    return seq > o.seq;
  }
};

template <typename T>
struct Ring {
  std::size_t capacity;
  std::deque<T> items;
  bool full() const noexcept { return capacity != kUnbounded && items.size() >= capacity; }
};

struct Result {
  std::uint32_t flow;
  std::uint64_t batch;
  int cls;
  bool final;
};

struct BufferItem {
  std::uint64_t enq_time;
  std::uint64_t order;
  bool is_result;
  std::uint64_t packet;  // packet index when !is_result
  Result result;
};

struct FlowState {
  std::uint32_t parsed = 0;
  std::vector<std::uint64_t> prefix_pkts;  // packet indices stored in the pool
  std::size_t served = 0;                  // prefixes already dispatched
  std::uint64_t pend_key = 0;
  bool pending = false;
  std::uint64_t batches = 0;
  // buffer side
  bool has_result = false;
  int cls = 0;
  bool final = false;
  std::uint64_t result_batch = 0;
  std::uint64_t result_time = 0;
  std::deque<std::uint64_t> waiting;
};

struct PacketState {
  std::uint32_t flow = 0;
  std::uint32_t seq = 0;
  std::uint64_t parsed = 0;
  std::uint64_t pooled = kNever;
  std::uint64_t dispatched = kNever;
  std::uint64_t batch = kNever;
  std::uint64_t result = kNever;
};

class Simulation {
 public:
  Simulation(std::span<const EscalatedPacket> pkts, const Classifier& clf, const SimConfig& cfg)
      : pkts_(pkts), clf_(clf), cfg_(cfg), ingress_{cfg.ingress_capacity, {}}, pool_in_{cfg.pool_capacity, {}},
        buf_pkts_{cfg.buffer_capacity, {}}, buf_results_{cfg.result_capacity, {}}, pstate_(pkts.size()) {}

  SimResult run() {
    for (std::size_t i = 0; i < pkts_.size(); ++i) {
      if (i > 0 && pkts_[i].time_us < pkts_[i - 1].time_us)
        throw std::invalid_argument("escalated stream is not time-ordered at record " + std::to_string(i));
      push_event(pkts_[i].time_us, kParser, EventType::arrival, i);
    }
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      now_ = e.time;
      ++out_.stats.events;
      dispatch(e);
    }
    out_.stats.end_time = now_;
    // a packet can leave before its own prefix reaches the pool
    for (auto& r : out_.log) r.pooled = pstate_[r.index].pooled;
    out_.stats.flows = flows_.size();
    for (const auto& f : flows_) out_.stats.max_batches_per_flow = std::max(out_.stats.max_batches_per_flow, f.batches);
    if (out_.log.size() != out_.stats.ingested)
      throw std::logic_error("IMIS simulation stalled: " + std::to_string(out_.stats.ingested - out_.log.size()) +
                             " packets never released");
    return std::move(out_);
  }

 private:
  void push_event(std::uint64_t t, int rank, EventType type, std::uint64_t arg = 0) {
    events_.push(Event{t, rank, next_seq_++, type, arg});
  }

  void wake(EventType type, int rank, bool& flag) {
    if (flag) return;
    flag = true;
    push_event(now_, rank, type);
  }
  void wake_parser() { wake(EventType::parser_wake, kParser, parser_wake_); }
  void wake_pool() { wake(EventType::pool_wake, kPool, pool_wake_); }
  void wake_analyzer() { wake(EventType::analyzer_wake, kAnalyzer, analyzer_wake_); }
  void wake_buffer() { wake(EventType::buffer_wake, kBuffer, buffer_wake_); }

  void dispatch(const Event& e) {
    switch (e.type) {
      case EventType::arrival: on_arrival(e.arg); break;
      case EventType::parser_wake: parser_wake_ = false; parser_step(); break;
      case EventType::parser_done: on_parser_done(); break;
      case EventType::pool_wake: pool_wake_ = false; pool_step(); break;
      case EventType::pool_done: on_pool_done(); break;
      case EventType::analyzer_wake: analyzer_wake_ = false; analyzer_step(); break;
      case EventType::analyzer_done: on_analyzer_done(); break;
      case EventType::analyzer_flush:
        analyzer_flush_ = false;
        if (analyzer_blocked_) try_flush_analyzer();
        break;
      case EventType::buffer_wake: buffer_wake_ = false; buffer_step(); break;
      case EventType::buffer_done: on_buffer_done(); break;
    }
  }

  std::uint32_t flow_id(const flow::FiveTuple& key) {
    auto [it, inserted] = flow_ids_.try_emplace(key, static_cast<std::uint32_t>(flows_.size()));
    if (inserted) flows_.emplace_back();
    return it->second;
  }

  // ---- ingress / parser

  void on_arrival(std::uint64_t i) {
    if (ingress_.full()) {
      if (cfg_.ingress_policy == OverflowPolicy::drop) {
        ++out_.stats.dropped;
        return;
      }
      backlog_.push_back(i);
    } else {
      ingress_.items.push_back(i);
    }
    ++out_.stats.ingested;
    pstate_[i].flow = flow_id(pkts_[i].key);
    wake_parser();
  }

  void parser_step() {
    if (parser_busy_) return;
    if (parser_pending_) {
      try_flush_parser();
      return;
    }
    if (ingress_.items.empty()) return;
    parser_item_ = ingress_.items.front();
    ingress_.items.pop_front();
    if (!backlog_.empty()) {
      ingress_.items.push_back(backlog_.front());
      backlog_.pop_front();
    }
    parser_busy_ = true;
    push_event(now_ + cfg_.parse_us, kParser, EventType::parser_done);
  }

  void on_parser_done() {
    parser_busy_ = false;
    const std::uint64_t i = parser_item_;
    auto& ps = pstate_[i];
    auto& fs = flows_[ps.flow];
    ps.seq = fs.parsed++;
    ps.parsed = now_;
    parser_pending_ = true;
    need_pool_ = ps.seq < static_cast<std::uint32_t>(kPrefixPackets);
    need_buffer_ = true;
    try_flush_parser();
  }

  void try_flush_parser() {
    if (need_pool_ && !pool_in_.full()) {
      pool_in_.items.push_back(parser_item_);
      need_pool_ = false;
      wake_pool();
    }
    if (need_buffer_ && !buf_pkts_.full()) {
      buf_pkts_.items.push_back(BufferItem{now_, order_++, false, parser_item_, {}});
      need_buffer_ = false;
      wake_buffer();
    }
    if (!need_pool_ && !need_buffer_) {
      parser_pending_ = false;
      parser_step();
    }
  }

  // ---- pool

  void pool_step() {
    if (pool_busy_ || pool_in_.items.empty()) return;
    pool_item_ = pool_in_.items.front();
    pool_in_.items.pop_front();
    if (parser_pending_) wake_parser();
    pool_busy_ = true;
    push_event(now_ + cfg_.pool_us, kPool, EventType::pool_done);
  }

  std::uint64_t pending_key(const FlowState& fs) const {
    if (cfg_.pool_policy == PoolPolicy::oldest_first) return pkts_[fs.prefix_pkts[fs.served]].time_us;
    return ~pkts_[fs.prefix_pkts.back()].time_us;
  }

  void on_pool_done() {
    pool_busy_ = false;
    const std::uint64_t i = pool_item_;
    auto& ps = pstate_[i];
    auto& fs = flows_[ps.flow];
    ps.pooled = now_;
    fs.prefix_pkts.push_back(i);
    if (fs.pending) pending_.erase({fs.pend_key, ps.flow});
    fs.pend_key = pending_key(fs);
    fs.pending = true;
    pending_.insert({fs.pend_key, ps.flow});
    wake_analyzer();
    pool_step();
  }

  // ---- analyzer

  void analyzer_step() {
    if (analyzer_busy_ || analyzer_blocked_ || pending_.empty()) return;
    const std::uint64_t batch = out_.stats.batches++;
    batch_results_.clear();
    results_pushed_ = 0;
    std::array<Prefix, kPrefixPackets> mat{};
    while (!pending_.empty() && batch_results_.size() < cfg_.batch_size) {
      const auto [key, f] = *pending_.begin();
      pending_.erase(pending_.begin());
      auto& fs = flows_[f];
      fs.pending = false;
      ++fs.batches;
      for (std::size_t k = fs.served; k < fs.prefix_pkts.size(); ++k) {
        auto& ps = pstate_[fs.prefix_pkts[k]];
        ps.dispatched = now_;
        ps.batch = batch;
      }
      fs.served = fs.prefix_pkts.size();
      const int n_real = static_cast<int>(fs.prefix_pkts.size());
      for (int k = 0; k < kPrefixPackets; ++k)
        mat[static_cast<std::size_t>(k)] = k < n_real ? pkts_[fs.prefix_pkts[static_cast<std::size_t>(k)]].prefix : Prefix{};
      const ClassifierOutput out = clf_(pkts_[fs.prefix_pkts.front()].key, mat, n_real);
      batch_results_.push_back(Result{f, batch, out.cls, out.final && n_real >= kPrefixPackets});
    }
    analyzer_busy_ = true;
    push_event(now_ + cfg_.batch_latency(batch_results_.size()), kAnalyzer, EventType::analyzer_done);
  }

  void on_analyzer_done() {
    analyzer_busy_ = false;
    analyzer_blocked_ = true;
    results_pushed_ = 0;
    try_flush_analyzer();
  }

  void try_flush_analyzer() {
    while (results_pushed_ < batch_results_.size() && !buf_results_.full()) {
      const Result& r = batch_results_[results_pushed_++];
      for (std::uint64_t i : flows_[r.flow].prefix_pkts)
        if (pstate_[i].batch == r.batch) pstate_[i].result = now_;
      buf_results_.items.push_back(BufferItem{now_, order_++, true, 0, r});
      wake_buffer();
    }
    if (results_pushed_ == batch_results_.size()) {
      analyzer_blocked_ = false;
      analyzer_step();
    }
  }

  // ---- buffer

  void buffer_step() {
    if (buffer_busy_) return;
    Ring<BufferItem>* src = nullptr;
    if (!buf_pkts_.items.empty()) src = &buf_pkts_;
    if (!buf_results_.items.empty()) {
      const auto& r = buf_results_.items.front();
      if (!src || r.enq_time < src->items.front().enq_time) src = &buf_results_;
    }
    if (!src) return;
    buffer_item_ = src->items.front();
    src->items.pop_front();
    if (src == &buf_pkts_ && parser_pending_) wake_parser();
    if (src == &buf_results_ && analyzer_blocked_) wake(EventType::analyzer_flush, kAnalyzer, analyzer_flush_);
    buffer_busy_ = true;
    push_event(now_ + cfg_.buffer_us, kBuffer, EventType::buffer_done);
  }

  void release(std::uint64_t i, const FlowState& fs) {
    const auto& ps = pstate_[i];
    ReleaseRecord r;
    r.index = i;
    r.flow = ps.flow;
    r.seq = ps.seq;
    r.arrival = pkts_[i].time_us;
    r.parsed = ps.parsed;
    r.release = now_;
    r.cls = fs.cls;
    r.final = fs.final;
    if (ps.batch != kNever && ps.batch == fs.result_batch) {
      r.full_pipeline = true;
      r.dispatched = ps.dispatched;
      r.result = ps.result;
    }
    out_.log.push_back(r);
  }

  void on_buffer_done() {
    buffer_busy_ = false;
    const BufferItem& it = buffer_item_;
    if (it.is_result) {
      auto& fs = flows_[it.result.flow];
      fs.has_result = true;
      fs.cls = it.result.cls;
      fs.final = it.result.final;
      fs.result_batch = it.result.batch;
      while (!fs.waiting.empty()) {
        release(fs.waiting.front(), fs);
        fs.waiting.pop_front();
      }
    } else {
      auto& fs = flows_[pstate_[it.packet].flow];
      if (fs.has_result)
        release(it.packet, fs);
      else
        fs.waiting.push_back(it.packet);
    }
    buffer_step();
  }

  std::span<const EscalatedPacket> pkts_;
  const Classifier& clf_;
  const SimConfig& cfg_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t now_ = 0;
  std::uint64_t order_ = 0;

  Ring<std::uint64_t> ingress_;
  std::deque<std::uint64_t> backlog_;
  Ring<std::uint64_t> pool_in_;
  Ring<BufferItem> buf_pkts_;
  Ring<BufferItem> buf_results_;

  std::map<flow::FiveTuple, std::uint32_t> flow_ids_;
  std::vector<FlowState> flows_;
  std::vector<PacketState> pstate_;
  std::set<std::pair<std::uint64_t, std::uint32_t>> pending_;

  bool parser_wake_ = false, pool_wake_ = false, analyzer_wake_ = false, analyzer_flush_ = false, buffer_wake_ = false;
  bool parser_busy_ = false, parser_pending_ = false, need_pool_ = false, need_buffer_ = false;
  std::uint64_t parser_item_ = 0;
  bool pool_busy_ = false;
  std::uint64_t pool_item_ = 0;
  bool analyzer_busy_ = false, analyzer_blocked_ = false;
  std::vector<Result> batch_results_;
  std::size_t results_pushed_ = 0;
  bool buffer_busy_ = false;
  BufferItem buffer_item_{};

  SimResult out_;
};

}  // namespace

SimResult run_pipeline(std::span<const EscalatedPacket> packets, const Classifier& classifier, const SimConfig& cfg) {
  cfg.validate();
  if (!classifier) throw std::invalid_argument("IMIS: no classifier");
  return Simulation(packets, classifier, cfg).run();
}

}  // namespace wirenn::imis
