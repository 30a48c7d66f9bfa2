#include "wirenn/window/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wirenn::window {

PacketCounters advance_counters(PacketCounters c, int S) {
  if (S < 2) throw std::invalid_argument("window size S must be >= 2");
  const auto s = static_cast<std::uint32_t>(S);
  if (c.ctr1 == 0) {
    c.ctr1 = 1;
    c.ctr2 = 0;
  } else {
    c.ctr1 = std::min(c.ctr1 + 1, s);
    c.ctr2 = (c.ctr2 + 1) % (s - 1);
  }
  ++c.pktcnt;
  return c;
}

RingBuffer::RingBuffer(int S) : bins_(S - 1) {
  if (S < 2 || S > rnn::kMaxWindow) throw std::invalid_argument("ring buffer: S out of range");
}

void RingBuffer::store(const PacketCounters& c, std::uint8_t ev) {
  if (c.ctr2 >= static_cast<std::uint32_t>(bins_)) throw std::logic_error("ring buffer: ctr2 out of range");
  cells_[c.ctr2] = ev;
}

void RingBuffer::store_and_gather(const PacketCounters& c, std::uint8_t ev, std::span<std::uint64_t> out) {
  const int S = bins_ + 1;
  if (c.ctr1 != static_cast<std::uint32_t>(S))
    throw std::logic_error("ring buffer: gather before the window is full (ctr1=" + std::to_string(c.ctr1) + ")");
  if (out.size() != static_cast<std::size_t>(S)) throw std::invalid_argument("ring buffer: output must hold S vectors");
  const auto snapshot = cells_;  // one parallel read of every bin
  for (int i = 0; i < bins_; ++i)
    out[static_cast<std::size_t>(i)] = snapshot[(c.ctr2 + static_cast<std::uint32_t>(i)) % static_cast<std::uint32_t>(bins_)];
  out[static_cast<std::size_t>(bins_)] = ev;
  cells_[c.ctr2] = ev;
}

int software_argmax(std::span<const std::uint32_t> values, std::span<const int> tie_order) noexcept {
  int best = tie_order.front();
  for (int idx : tie_order)
    if (values[static_cast<std::size_t>(idx)] > values[static_cast<std::size_t>(best)]) best = idx;
  return best;
}

WindowEngine::WindowEngine(const rnn::ModelBundle& bundle, Options opts) : bundle_(&bundle), opts_(opts) {
  const auto& h = bundle.hyper;
  h.validate();
  cpr_width_ = h.cpr_width();
  cpr_limit_ = static_cast<std::uint32_t>(rnn::width_mask(cpr_width_));
  chain_ = argmax::split_argmax(h.n_classes, cpr_width_, h.argmax_fan, bundle.tie_order);
}

bool WindowEngine::is_ambiguous(std::uint32_t cpr_c, std::uint32_t wincnt, int c) const noexcept {
  const std::int64_t lhs = static_cast<std::int64_t>(cpr_c) << bundle_->hyper.prob_bits;
  const std::int64_t rhs =
      static_cast<std::int64_t>(bundle_->thresholds.t_conf_raw[static_cast<std::size_t>(c)]) * wincnt;
  return lhs - rhs < 0;
}

std::uint32_t WindowEngine::confidence_raw(std::uint32_t cpr_c, std::uint32_t wincnt) const noexcept {
  if (wincnt == 0) return 0;
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(cpr_c) << bundle_->hyper.prob_bits) / wincnt);
}

Decision WindowEngine::accumulate_and_decide(CprState& st, const rnn::IntermediateResult& pr) const {
  const int n = bundle_->hyper.n_classes;
  if (pr.n_classes != n) throw std::invalid_argument("intermediate result has the wrong class count");
  for (int c = 0; c < n; ++c) {
    const auto i = static_cast<std::size_t>(c);
    const std::uint64_t sum = std::uint64_t{st.cpr[i]} + pr.probs[i];
    if (sum > cpr_limit_)
      throw std::logic_error("CPR overflow: class " + std::to_string(c) + " reached " + std::to_string(sum) +
                             ", width " + std::to_string(cpr_width_) + " bits");
    st.cpr[i] = static_cast<std::uint32_t>(sum);
  }
  ++st.wincnt;

  const std::span<const std::uint32_t> cpr(st.cpr.data(), static_cast<std::size_t>(n));
  Decision d;
  d.cls = static_cast<int>(chain_.lookup(cpr));
  if (opts_.cross_check_argmax) {
    const int expect = software_argmax(cpr, bundle_->tie_order);
    if (expect != d.cls) {
      ++mismatches_;
      throw std::logic_error("argmax chain returned " + std::to_string(d.cls) + ", plain argmax " +
                             std::to_string(expect));
    }
  }
  d.ambiguous = is_ambiguous(st.cpr[static_cast<std::size_t>(d.cls)], st.wincnt, d.cls);
  if (d.ambiguous) {
    ++st.esccnt;
    if (!st.esc_flag && st.esccnt >= bundle_->thresholds.t_esc) {
      st.esc_flag = true;
      d.escalation_event = true;
    }
  }
  return d;
}

bool WindowEngine::periodic_reset(CprState& st, std::uint32_t pktcnt) const noexcept {
  if (pktcnt % static_cast<std::uint32_t>(bundle_->hyper.reset_period) != 0) return false;
  st.cpr.fill(0);
  st.wincnt = 0;
  return true;
}

}  // namespace wirenn::window
