#include "wirenn/harness/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "wirenn/error.hpp"

namespace wirenn::harness {

std::size_t Trace::flow_count() const {
  std::unordered_set<std::uint32_t> ids;
  for (const auto& p : packets) ids.insert(p.flow);
  return ids.size();
}

bool Trace::labeled() const {
  return !packets.empty() && std::all_of(packets.begin(), packets.end(), [](const PacketEvent& p) { return p.label >= 0; });
}

int Trace::max_label() const {
  int m = -1;
  for (const auto& p : packets) m = std::max(m, p.label);
  return m;
}

std::uint64_t Trace::duration_us() const {
  return packets.empty() ? 0 : packets.back().time_us - packets.front().time_us;
}

void Trace::validate(int n_classes) const {
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (i > 0 && packets[i].time_us < packets[i - 1].time_us)
      throw std::invalid_argument("trace: timestamps decrease at packet " + std::to_string(i));
    if (packets[i].label < -1 || packets[i].label >= n_classes)
      throw std::invalid_argument("trace: label " + std::to_string(packets[i].label) + " out of range at packet " +
                                  std::to_string(i));
  }
}

void Trace::assign_flow_ids_by_tuple() {
  std::map<flow::FiveTuple, std::uint32_t> ids;
  std::uint32_t next = 0;
  for (const auto& p : packets)
    if (p.flow != kNoFlow) next = std::max(next, p.flow + 1);
  for (auto& p : packets) {
    if (p.flow != kNoFlow) continue;
    auto [it, inserted] = ids.try_emplace(p.key, next);
    if (inserted) ++next;
    p.flow = it->second;
  }
}

// ---------------------------------------------------------------- CSV

namespace {

enum Col { c_time, c_src, c_dst, c_sport, c_dport, c_proto, c_length, c_label, c_ttl, c_tos, c_tcp_offset, c_flow, c_count };
constexpr const char* kColNames[c_count] = {"time_us", "src",   "dst", "sport", "dport",      "proto",
                                            "length",  "label", "ttl", "tos",   "tcp_offset", "flow"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r' && ch != ' ' && ch != '\t') {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <typename T>
T parse_num(const std::string& s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

template <typename T>
T parse_bounded(const std::string& s, const char* what, std::int64_t lo, std::int64_t hi) {
  const auto v = parse_num<std::int64_t>(s, what);
  if (v < lo || v > hi) throw std::invalid_argument(std::string(what) + " out of range: " + s);
  return static_cast<T>(v);
}

}  // namespace

Trace read_trace_csv(std::istream& is, ReadStats* stats) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("trace: empty input");
  const auto header = split_csv(line);
  std::array<int, c_count> pos;
  pos.fill(-1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto* it = std::find_if(std::begin(kColNames), std::end(kColNames), [&](const char* n) { return header[i] == n; });
    if (it == std::end(kColNames)) throw FormatError("trace: unknown column '" + header[i] + "'");
    pos[static_cast<std::size_t>(it - std::begin(kColNames))] = static_cast<int>(i);
  }
  for (int c = c_time; c <= c_length; ++c)
    if (pos[static_cast<std::size_t>(c)] < 0) throw FormatError(std::string("trace: missing column '") + kColNames[c] + "'");

  Trace t;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (stats) ++stats->lines;
    try {
      const auto f = split_csv(line);
      if (f.size() != header.size()) throw std::invalid_argument("expected " + std::to_string(header.size()) + " fields");
      auto get = [&](Col c) -> const std::string& { return f[static_cast<std::size_t>(pos[c])]; };
      auto has = [&](Col c) { return pos[c] >= 0 && !get(c).empty(); };
      PacketEvent p;
      p.time_us = parse_num<std::uint64_t>(get(c_time), "time_us");
      p.key.src = flow::parse_ipv4(get(c_src));
      p.key.dst = flow::parse_ipv4(get(c_dst));
      p.key.sport = parse_bounded<std::uint16_t>(get(c_sport), "sport", 0, 65535);
      p.key.dport = parse_bounded<std::uint16_t>(get(c_dport), "dport", 0, 65535);
      p.key.proto = parse_bounded<std::uint8_t>(get(c_proto), "proto", 0, 255);
      p.length = parse_bounded<std::uint32_t>(get(c_length), "length", 0, 0xFFFFFFFFLL);
      if (has(c_label)) p.label = parse_bounded<int>(get(c_label), "label", -1, 1 << 20);
      if (has(c_ttl)) p.ttl = parse_bounded<std::uint8_t>(get(c_ttl), "ttl", 0, 255);
      if (has(c_tos)) p.tos = parse_bounded<std::uint8_t>(get(c_tos), "tos", 0, 255);
      if (has(c_tcp_offset)) p.tcp_offset = parse_bounded<std::uint8_t>(get(c_tcp_offset), "tcp_offset", 0, 15);
      if (has(c_flow)) p.flow = parse_bounded<std::uint32_t>(get(c_flow), "flow", 0, 0xFFFFFFFELL);
      t.packets.push_back(p);
    } catch (const std::invalid_argument& e) {
      if (!stats) throw FormatError("trace line " + std::to_string(lineno) + ": " + e.what());
      ++stats->malformed;
    }
  }
  t.assign_flow_ids_by_tuple();
  return t;
}

void write_trace_csv(std::ostream& os, const Trace& t) {
  os << "time_us,src,dst,sport,dport,proto,length,label,ttl,tos,tcp_offset,flow\n";
  for (const auto& p : t.packets) {
    os << p.time_us << ',' << flow::format_ipv4(p.key.src) << ',' << flow::format_ipv4(p.key.dst) << ','
       << p.key.sport << ',' << p.key.dport << ',' << unsigned{p.key.proto} << ',' << p.length << ',' << p.label << ','
       << unsigned{p.ttl} << ',' << unsigned{p.tos} << ',' << unsigned{p.tcp_offset} << ',';
    if (p.flow != kNoFlow) os << p.flow;
    os << '\n';
  }
}

// ---------------------------------------------------------------- binary

namespace {

constexpr char kTraceMagic[8] = {'W', 'N', 'T', 'R', 'C', '0', '0', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
  using U = std::make_unsigned_t<T>;
  const auto u = static_cast<U>(v);
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  using U = std::make_unsigned_t<T>;
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw FormatError("trace: truncated binary file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<U>(v | static_cast<U>(static_cast<U>(b[i]) << (8 * i)));
  return static_cast<T>(v);
}

}  // namespace

void write_trace_binary(std::ostream& os, const Trace& t) {
  os.write(kTraceMagic, sizeof kTraceMagic);
  put_le<std::uint64_t>(os, t.packets.size());
  for (const auto& p : t.packets) {
    put_le<std::uint64_t>(os, p.time_us);
    const auto key = flow::encode(p.key);
    os.write(reinterpret_cast<const char*>(key.data()), key.size());
    put_le<std::uint32_t>(os, p.length);
    put_le<std::int32_t>(os, p.label);
    put_le<std::uint8_t>(os, p.ttl);
    put_le<std::uint8_t>(os, p.tos);
    put_le<std::uint8_t>(os, p.tcp_offset);
    put_le<std::uint32_t>(os, p.flow);
  }
}

Trace read_trace_binary(std::istream& is) {
  char magic[sizeof kTraceMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kTraceMagic, sizeof magic) != 0)
    throw FormatError("trace: bad binary magic");
  const auto n = get_le<std::uint64_t>(is);
  Trace t;
  t.packets.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) {
    PacketEvent p;
    p.time_us = get_le<std::uint64_t>(is);
    std::array<std::uint8_t, flow::kKeyBytes> key{};
    if (!is.read(reinterpret_cast<char*>(key.data()), key.size())) throw FormatError("trace: truncated binary file");
    p.key = flow::decode(key);
    p.length = get_le<std::uint32_t>(is);
    p.label = get_le<std::int32_t>(is);
    p.ttl = get_le<std::uint8_t>(is);
    p.tos = get_le<std::uint8_t>(is);
    p.tcp_offset = get_le<std::uint8_t>(is);
    p.flow = get_le<std::uint32_t>(is);
    t.packets.push_back(p);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trace: trailing bytes in binary file");
  return t;
}

Trace load_trace(const std::filesystem::path& path, ReadStats* stats) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[sizeof kTraceMagic] = {};
  is.read(magic, sizeof magic);
  const bool binary = is.gcount() == sizeof magic && std::memcmp(magic, kTraceMagic, sizeof magic) == 0;
  is.clear();
  is.seekg(0);
  return binary ? read_trace_binary(is) : read_trace_csv(is, stats);
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (path.extension() == ".bin")
    write_trace_binary(os, trace);
  else
    write_trace_csv(os, trace);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------- split

Trace split_flows(const std::vector<PacketEvent>& events, std::uint64_t gap_us, SplitStats* stats) {
  struct Open {
    std::uint64_t last;
    std::uint32_t id;
  };
  std::map<flow::FiveTuple, Open> open;
  Trace out;
  std::uint32_t next = 0;
  SplitStats st;
  st.input = events.size();
  for (const auto& e : events) {
    if (e.key.proto != 6 && e.key.proto != 17) {
      ++st.dropped;
      continue;
    }
    PacketEvent p = e;
    auto it = open.find(e.key);
    if (it == open.end() || (e.time_us > it->second.last && e.time_us - it->second.last > gap_us)) {
      open[e.key] = Open{e.time_us, next};
      p.flow = next++;
    } else {
      it->second.last = std::max(it->second.last, e.time_us);
      p.flow = it->second.id;
    }
    out.packets.push_back(p);
  }
  st.flows = next;
  if (stats) *stats = st;
  return out;
}

// ---------------------------------------------------------------- synth

SynthSpec default_synth_spec(int n_classes, double separation) {
  if (n_classes < 2) throw std::invalid_argument("synthetic spec needs at least 2 classes");
  if (!(separation > 0.0 && separation <= 1.0)) throw std::invalid_argument("separation must be in (0, 1]");
  SynthSpec s;
  const double mid_len = 700, half_len = 600 * separation;
  const double lo_ipd = std::log(200.0), hi_ipd = std::log(20000.0);
  const double mid_ipd = 0.5 * (lo_ipd + hi_ipd), half_ipd = 0.5 * (hi_ipd - lo_ipd) * separation;
  for (int c = 0; c < n_classes; ++c) {
    const double u = static_cast<double>(c) / static_cast<double>(n_classes - 1) * 2.0 - 1.0;  // [-1, 1]
    ClassSpec k;
    k.len_mean = mid_len + u * half_len;
    k.len_std = 40;
    k.ipd_mean_us = std::exp(mid_ipd - u * half_ipd);
    k.min_packets = 4;
    k.max_packets = 48;
    k.proto = c % 3 == 2 ? 17 : 6;
    k.ttl = static_cast<std::uint8_t>(64 + 16 * (c % 4));
    s.classes.push_back(k);
  }
  return s;
}

bool is_degenerate(const SynthSpec& spec) {
  for (std::size_t a = 0; a < spec.classes.size(); ++a)
    for (std::size_t b = a + 1; b < spec.classes.size(); ++b) {
      const auto &x = spec.classes[a], &y = spec.classes[b];
      if (x.len_mean == y.len_mean && x.len_std == y.len_std && x.ipd_mean_us == y.ipd_mean_us) return true;
    }
  return false;
}

Trace synth_trace(const SynthSpec& spec) {
  if (spec.classes.size() < 2) throw std::invalid_argument("synth_trace needs at least 2 classes");
  if (!(spec.flow_rate > 0)) throw std::invalid_argument("synth_trace: flow_rate must be positive");
  for (const auto& c : spec.classes)
    if (c.min_packets < 1 || c.max_packets < c.min_packets || !(c.ipd_mean_us > 0) || !(c.len_std >= 0))
      throw std::invalid_argument("synth_trace: bad class parameters");

  std::mt19937_64 rng(spec.seed);
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto normal = [&](double mean, double sd) {
    // Box-Muller on the engine's raw output keeps traces identical across standard libraries.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  };
  auto exponential = [&](double mean) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return -mean * std::log(u);
  };

  Trace t;
  double start = 0;
  const auto n_classes = static_cast<std::uint32_t>(spec.classes.size());
  for (std::size_t f = 0; f < spec.flows; ++f) {
    start += exponential(1e6 / spec.flow_rate);
    const auto label = static_cast<std::uint32_t>(rng() % n_classes);
    const ClassSpec& c = spec.classes[label];
    const std::uint32_t n = c.min_packets + static_cast<std::uint32_t>(rng() % (c.max_packets - c.min_packets + 1));
    flow::FiveTuple key;
    key.src = 0x0A000000u | static_cast<std::uint32_t>(f & 0xFFFFFF);
    key.dst = 0xC0A80000u | static_cast<std::uint32_t>(rng() & 0xFFFF);
    key.sport = static_cast<std::uint16_t>(1024 + rng() % 60000);
    key.dport = static_cast<std::uint16_t>(c.proto == 17 ? 53 + (rng() % 4) * 1000 : 443);
    key.proto = c.proto;
    double ts = start;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i > 0) ts += exponential(c.ipd_mean_us);
      PacketEvent p;
      p.time_us = static_cast<std::uint64_t>(ts);
      p.key = key;
      p.length = static_cast<std::uint32_t>(std::clamp(std::lround(normal(c.len_mean, c.len_std)), 40L, 1500L));
      p.label = static_cast<int>(label);
      p.ttl = c.ttl;
      p.tos = c.tos;
      p.tcp_offset = c.proto == 6 ? 5 : 0;
      p.flow = static_cast<std::uint32_t>(f);
      t.packets.push_back(p);
    }
  }
  std::stable_sort(t.packets.begin(), t.packets.end(),
                   [](const PacketEvent& a, const PacketEvent& b) { return a.time_us < b.time_us; });
  return t;
}

}  // namespace wirenn::harness
