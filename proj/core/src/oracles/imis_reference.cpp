#include "wirenn/oracles/imis_reference.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace wirenn::oracles {

using imis::kNever;

imis::SimResult reference_schedule(std::span<const imis::EscalatedPacket> pkts, const imis::Classifier& clf,
                                   const imis::SimConfig& cfg) {
  const std::size_t n = pkts.size();
  imis::SimResult res;

  std::map<flow::FiveTuple, std::uint32_t> ids;
  std::vector<std::uint32_t> flow(n), seq(n);
  std::vector<std::uint32_t> count;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.try_emplace(pkts[i].key, static_cast<std::uint32_t>(count.size()));
    if (inserted) count.push_back(0);
    flow[i] = it->second;
    seq[i] = count[flow[i]]++;
  }
  const std::size_t n_flows = count.size();

  // parser then pool, both FIFO
  std::vector<std::uint64_t> parsed(n), pooled(n, kNever);
  std::uint64_t parser_free = 0, pool_free = 0;
  std::vector<std::vector<std::size_t>> prefixes(n_flows);
  std::vector<std::size_t> pool_order;
  for (std::size_t i = 0; i < n; ++i) {
    parsed[i] = std::max(pkts[i].time_us, parser_free) + cfg.parse_us;
    parser_free = parsed[i];
    if (seq[i] < static_cast<std::uint32_t>(imis::kPrefixPackets)) {
      pooled[i] = std::max(parsed[i], pool_free) + cfg.pool_us;
      pool_free = pooled[i];
      prefixes[flow[i]].push_back(i);
      pool_order.push_back(i);
    }
  }

  // analyzer
  struct Res {
    std::uint64_t time;
    std::uint32_t flow;
    std::uint64_t batch;
    int cls;
    bool final;
  };
  std::vector<Res> results;
  std::vector<std::uint64_t> dispatched(n, kNever), batch_of(n, kNever), result_time(n, kNever);
  std::vector<std::size_t> served(n_flows, 0);
  std::vector<std::uint64_t> flow_batches(n_flows, 0);
  std::size_t next_unserved = 0;  // into pool_order, first prefix not yet dispatched
  std::uint64_t analyzer_free = 0;
  std::uint64_t batch = 0;
  auto is_served = [&](std::size_t i) {
    const auto& pf = prefixes[flow[i]];
    return static_cast<std::size_t>(std::find(pf.begin(), pf.end(), i) - pf.begin()) < served[flow[i]];
  };
  for (;;) {
    while (next_unserved < pool_order.size() && is_served(pool_order[next_unserved])) ++next_unserved;
    if (next_unserved == pool_order.size()) break;
    const std::uint64_t t = std::max(analyzer_free, pooled[pool_order[next_unserved]]);

    std::vector<std::tuple<std::uint64_t, std::uint32_t, std::size_t>> pending;  // key, flow, pooled count
    for (std::uint32_t f = 0; f < n_flows; ++f) {
      std::size_t avail = 0;
      while (avail < prefixes[f].size() && pooled[prefixes[f][avail]] <= t) ++avail;
      if (avail <= served[f]) continue;
      const std::uint64_t key = cfg.pool_policy == imis::PoolPolicy::oldest_first
                                    ? pkts[prefixes[f][served[f]]].time_us
                                    : ~pkts[prefixes[f][avail - 1]].time_us;
      pending.emplace_back(key, f, avail);
    }
    std::sort(pending.begin(), pending.end());
    if (pending.size() > cfg.batch_size) pending.resize(cfg.batch_size);

    const std::uint64_t done = t + cfg.batch_latency(pending.size());
    for (const auto& [key, f, avail] : pending) {
      for (std::size_t k = served[f]; k < avail; ++k) {
        dispatched[prefixes[f][k]] = t;
        batch_of[prefixes[f][k]] = batch;
        result_time[prefixes[f][k]] = done;
      }
      served[f] = avail;
      ++flow_batches[f];
      std::array<imis::Prefix, imis::kPrefixPackets> mat{};
      for (std::size_t k = 0; k < avail; ++k) mat[k] = pkts[prefixes[f][k]].prefix;
      const auto out = clf(pkts[prefixes[f][0]].key, mat, static_cast<int>(avail));
      results.push_back(Res{done, f, batch, out.cls, out.final && avail >= static_cast<std::size_t>(imis::kPrefixPackets)});
    }
    analyzer_free = done;
    ++batch;
  }

  // buffer: packets before results on equal enqueue times
  struct Item {
    std::uint64_t enq;
    int type;
    std::size_t idx;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < n; ++i) items.push_back({parsed[i], 0, i});
  for (std::size_t r = 0; r < results.size(); ++r) items.push_back({results[r].time, 1, r});
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return std::tie(a.enq, a.type) < std::tie(b.enq, b.type); });

  struct FlowResult {
    bool has = false;
    int cls = 0;
    bool final = false;
    std::uint64_t batch = 0;
    std::vector<std::size_t> waiting;
  };
  std::vector<FlowResult> fr(n_flows);
  std::uint64_t buffer_free = 0;
  auto release = [&](std::size_t i, std::uint64_t when) {
    const auto& f = fr[flow[i]];
    imis::ReleaseRecord r;
    r.index = i;
    r.flow = flow[i];
    r.seq = seq[i];
    r.arrival = pkts[i].time_us;
    r.parsed = parsed[i];
    r.pooled = pooled[i];
    r.release = when;
    r.cls = f.cls;
    r.final = f.final;
    if (batch_of[i] != kNever && batch_of[i] == f.batch) {
      r.full_pipeline = true;
      r.dispatched = dispatched[i];
      r.result = result_time[i];
    }
    res.log.push_back(r);
  };
  for (const Item& it : items) {
    const std::uint64_t done = std::max(buffer_free, it.enq) + cfg.buffer_us;
    buffer_free = done;
    if (it.type == 1) {
      const Res& r = results[it.idx];
      auto& f = fr[r.flow];
      f.has = true;
      f.cls = r.cls;
      f.final = r.final;
      f.batch = r.batch;
      for (std::size_t i : f.waiting) release(i, done);
      f.waiting.clear();
    } else if (fr[flow[it.idx]].has) {
      release(it.idx, done);
    } else {
      fr[flow[it.idx]].waiting.push_back(it.idx);
    }
  }

  res.stats.ingested = n;
  res.stats.batches = batch;
  res.stats.flows = n_flows;
  for (auto b : flow_batches) res.stats.max_batches_per_flow = std::max(res.stats.max_batches_per_flow, b);
  res.stats.end_time = buffer_free;
  return res;
}

}  // namespace wirenn::oracles
