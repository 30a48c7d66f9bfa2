#include "wirenn/harness/resources.hpp"

#include <ostream>

#include "wirenn/argmax/chain.hpp"

namespace wirenn::harness {

namespace {

int bits_for(std::uint64_t max_value) {
  int b = 1;
  while (b < 64 && (std::uint64_t{1} << b) <= max_value) ++b;
  return b;
}

}  // namespace

std::uint64_t ResourceReport::exact_table_bits() const noexcept {
  std::uint64_t s = 0;
  for (const auto& t : exact_tables) s += t.bits();
  return s;
}

ResourceReport estimate_resources(const rnn::Hyperparams& h) {
  h.validate();
  ResourceReport r;
  auto add = [&r](const char* name, int in, int out) {
    r.exact_tables.push_back({name, std::uint64_t{1} << in, in, out});
  };
  const int E = h.ev_width, H = h.h_width;
  add("len_embed", h.len_input_bits, h.len_embed_width);
  add("ipd_embed", h.ipd_input_bits, h.ipd_embed_width);
  add("fc", h.fc_input_width(), E);
  if (h.merged) {
    if (h.window == 2) {
      add("output_gru2_gru1", 2 * E, h.output_width());
    } else {
      add("gru2_gru1", 2 * E, H);
      for (int i = 3; i < h.window; ++i) add("gru", E + H, H);
      add("output_gru_s", E + H, h.output_width());
    }
  } else {
    add("gru1", E, H);
    for (int i = 2; i <= h.window; ++i) add("gru", E + H, H);
    add("output", H, h.output_width());
  }

  r.cpr_width = h.cpr_width();
  const auto chain = argmax::split_argmax(h.n_classes, r.cpr_width, h.argmax_fan);
  for (const auto& st : chain.stages())
    r.argmax_stages.push_back({static_cast<int>(st.operands.size()), static_cast<int>(st.operands.size()) * r.cpr_width,
                               st.table.size()});
  r.argmax_entries = chain.total_entries();

  r.ev_bits = rnn::kEvCellBits * (h.window - 1) + 8;
  r.cpr_bits = h.n_classes * r.cpr_width;
  r.counter_bits = bits_for(static_cast<std::uint64_t>(h.reset_period)) + 32 + 1 + 32;
  return r;
}

ResourceReport estimate_resources(const rnn::ModelBundle& bundle) {
  ResourceReport r = estimate_resources(bundle.hyper);
  // Prefer the bundle's actual table shapes where present.
  const rnn::LookupTable* tabs[] = {&bundle.tables.len_embed, &bundle.tables.ipd_embed, &bundle.tables.fc};
  for (std::size_t i = 0; i < 3; ++i)
    if (!tabs[i]->empty()) r.exact_tables[i].entries = tabs[i]->size();
  return r;
}

void write_resources(std::ostream& os, const ResourceReport& r, std::uint32_t n_slots) {
  os << "exact-match tables\n";
  for (const auto& t : r.exact_tables)
    os << "  " << t.name << " entries=" << t.entries << " key_bits=" << t.key_bits << " value_bits=" << t.value_bits
       << " bits=" << t.bits() << "\n";
  os << "  total_bits=" << r.exact_table_bits() << "\n";
  os << "argmax (ternary), cpr_width=" << r.cpr_width << "\n";
  for (const auto& s : r.argmax_stages)
    os << "  stage group=" << s.group << " key_bits=" << s.key_bits << " entries=" << s.entries << "\n";
  os << "  total_entries=" << r.argmax_entries << "\n";
  os << "per-flow stateful bits\n"
     << "  flow_info=" << r.flow_info_bits << "\n"
     << "  ev=" << r.ev_bits << "\n"
     << "  cpr=" << r.cpr_bits << "\n"
     << "  counters=" << r.counter_bits << "\n"
     << "  total=" << r.per_flow_bits() << "\n";
  if (n_slots > 0)
    os << "slots=" << n_slots << " stateful_total_bits=" << std::uint64_t{n_slots} * static_cast<std::uint64_t>(r.per_flow_bits())
       << "\n";
}

}  // namespace wirenn::harness
