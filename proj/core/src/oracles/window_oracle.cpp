#include "wirenn/oracles/window_oracle.hpp"

#include <limits>
#include <random>
#include <stdexcept>

#include "wirenn/window/engine.hpp"

namespace wirenn::oracles {

std::vector<std::uint64_t> NaiveHistory::window(int S) const {
  if (evs_.size() < static_cast<std::size_t>(S)) throw std::logic_error("history shorter than the window");
  return {evs_.end() - S, evs_.end()};
}

namespace {

void run_stream(int S, const std::vector<std::uint8_t>& stream, WindowCheck& out) {
  window::PacketCounters c;
  window::RingBuffer ring(S);
  NaiveHistory hist;
  std::vector<std::uint64_t> got(static_cast<std::size_t>(S));
  for (auto ev : stream) {
    c = window::advance_counters(c, S);
    hist.push(ev);
    if (!window::window_full(c, S)) {
      ring.store(c, ev);
      continue;
    }
    ring.store_and_gather(c, ev, got);
    ++out.windows;
    if (got != hist.window(S)) ++out.mismatches;
  }
  ++out.streams;
}

}  // namespace

WindowCheck check_ring_exhaustive(int S, int len, int alphabet) {
  if (alphabet < 1 || len < 1) throw std::invalid_argument("check_ring_exhaustive: bad arguments");
  WindowCheck out;
  std::vector<std::uint8_t> stream(static_cast<std::size_t>(len), 0);
  while (true) {
    run_stream(S, stream, out);
    std::size_t i = 0;
    while (i < stream.size() && ++stream[i] == alphabet) stream[i++] = 0;
    if (i == stream.size()) break;
  }
  return out;
}

WindowCheck check_ring_random(int S, int len, std::uint64_t streams, std::uint64_t seed) {
  WindowCheck out;
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> stream(static_cast<std::size_t>(len));
  for (std::uint64_t s = 0; s < streams; ++s) {
    for (auto& e : stream) e = static_cast<std::uint8_t>(rng());
    run_stream(S, stream, out);
  }
  return out;
}

RuleList::RuleList(const tree::TreeModel& model) {
  constexpr auto kLo = std::numeric_limits<std::int64_t>::min();
  constexpr auto kHi = std::numeric_limits<std::int64_t>::max();
  struct Partial {
    std::array<std::int64_t, tree::kFeatureCount> lo, hi;
    std::vector<double> votes;
  };
  std::vector<Partial> parts(1);
  parts[0].lo.fill(kLo);
  parts[0].hi.fill(kHi);
  parts[0].votes.assign(static_cast<std::size_t>(model.n_classes()), 0.0);

  for (const auto& t : model.trees()) {
    std::vector<Partial> next;
    // Enumerate leaves with their path constraints, intersect with every partial rule.
    struct Frame {
      std::int32_t node;
      std::array<std::int64_t, tree::kFeatureCount> lo, hi;
    };
    std::vector<Frame> stack;
    Frame root{0, {}, {}};
    root.lo.fill(kLo);
    root.hi.fill(kHi);
    stack.push_back(root);
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      const auto& n = t.nodes[static_cast<std::size_t>(f.node)];
      if (!n.leaf) {
        const auto fi = static_cast<std::size_t>(n.feature);
        Frame l = f, r = f;
        l.node = n.left;
        l.hi[fi] = std::min(l.hi[fi], n.threshold);
        r.node = n.right;
        r.lo[fi] = std::max(r.lo[fi], n.threshold);
        stack.push_back(r);
        stack.push_back(l);
        continue;
      }
      for (const auto& p : parts) {
        Partial q = p;
        bool empty = false;
        for (std::size_t i = 0; i < tree::kFeatureCount; ++i) {
          q.lo[i] = std::max(q.lo[i], f.lo[i]);
          q.hi[i] = std::min(q.hi[i], f.hi[i]);
          empty = empty || q.lo[i] >= q.hi[i];
        }
        if (empty) continue;
        for (std::size_t c = 0; c < q.votes.size(); ++c) q.votes[c] += n.votes[c];
        next.push_back(std::move(q));
      }
    }
    parts = std::move(next);
  }
  for (const auto& p : parts) {
    int best = 0;
    for (std::size_t c = 1; c < p.votes.size(); ++c)
      if (p.votes[c] > p.votes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    rules_.push_back({p.lo, p.hi, best});
  }
}

int RuleList::infer(const tree::PacketFeatures& pkt) const {
  for (const auto& r : rules_) {
    bool match = true;
    for (std::size_t i = 0; i < tree::kFeatureCount && match; ++i) {
      const auto v = static_cast<std::int64_t>(pkt.values[i]);
      match = v > r.lo[i] && v <= r.hi[i];
    }
    if (match) return r.cls;
  }
  throw std::logic_error("rule list is not total");
}

}  // namespace wirenn::oracles
