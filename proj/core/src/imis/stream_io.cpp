#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "wirenn/error.hpp"
#include "wirenn/imis/simulator.hpp"

namespace wirenn::imis {

std::uint64_t percentile(std::span<const std::uint64_t> sorted, double q) {
  if (sorted.empty()) return 0;
  const double rank = std::ceil(q * static_cast<double>(sorted.size()));
  const std::size_t idx = rank < 1.0 ? 0 : std::min(sorted.size() - 1, static_cast<std::size_t>(rank) - 1);
  return sorted[idx];
}

LatencyReport latency_report(std::span<const ReleaseRecord> log) {
  if (log.empty()) throw std::invalid_argument("latency report: empty release log");
  static const char* const names[] = {"parse->pool", "pool->analyze", "analyze->result", "result->release",
                                      "end-to-end"};
  std::array<std::vector<std::uint64_t>, 5> samples;
  LatencyReport rep;
  for (const auto& r : log) {
    if (!r.full_pipeline) continue;
    ++rep.packets;
    samples[0].push_back(r.pooled - r.arrival);
    samples[1].push_back(r.dispatched - r.pooled);
    samples[2].push_back(r.result - r.dispatched);
    samples[3].push_back(r.release - r.result);
    samples[4].push_back(r.release - r.arrival);
  }
  for (std::size_t p = 0; p < samples.size(); ++p) {
    auto& v = samples[p];
    std::sort(v.begin(), v.end());
    PhaseStats s;
    s.name = names[p];
    s.count = v.size();
    if (!v.empty()) {
      s.mean = static_cast<double>(std::accumulate(v.begin(), v.end(), std::uint64_t{0})) / static_cast<double>(v.size());
      s.min = v.front();
      s.max = v.back();
      s.p50 = percentile(v, 0.50);
      s.p90 = percentile(v, 0.90);
      s.p99 = percentile(v, 0.99);
    }
    rep.phases.push_back(std::move(s));
  }
  return rep;
}

void write_latency_report(std::ostream& os, const LatencyReport& r) {
  os << "phase,count,mean_us,min_us,p50_us,p90_us,p99_us,max_us\n";
  for (const auto& p : r.phases)
    os << p.name << ',' << p.count << ',' << std::fixed << std::setprecision(3) << p.mean << ',' << p.min << ','
       << p.p50 << ',' << p.p90 << ',' << p.p99 << ',' << p.max << '\n';
}

namespace {

constexpr char kMagic[8] = {'W', 'N', 'E', 'S', 'C', '0', '0', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw FormatError("escalated stream: truncated file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  return v;
}

}  // namespace

void write_stream(std::ostream& os, std::span<const EscalatedPacket> packets) {
  os.write(kMagic, sizeof kMagic);
  put_le<std::uint64_t>(os, packets.size());
  for (const auto& p : packets) {
    const auto key = flow::encode(p.key);
    os.write(reinterpret_cast<const char*>(key.data()), key.size());
    put_le<std::uint64_t>(os, p.time_us);
    put_le<std::uint32_t>(os, p.seq);
    os.write(reinterpret_cast<const char*>(p.prefix.data()), p.prefix.size());
  }
}

std::vector<EscalatedPacket> read_stream(std::istream& is) {
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FormatError("escalated stream: bad magic");
  const auto n = get_le<std::uint64_t>(is);
  std::vector<EscalatedPacket> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::array<std::uint8_t, flow::kKeyBytes> key{};
    EscalatedPacket p;
    if (!is.read(reinterpret_cast<char*>(key.data()), key.size())) throw FormatError("escalated stream: truncated file");
    p.key = flow::decode(key);
    p.time_us = get_le<std::uint64_t>(is);
    p.seq = get_le<std::uint32_t>(is);
    if (!is.read(reinterpret_cast<char*>(p.prefix.data()), p.prefix.size()))
      throw FormatError("escalated stream: truncated file");
    out.push_back(p);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("escalated stream: trailing bytes");
  return out;
}

void save_stream(const std::string& path, std::span<const EscalatedPacket> packets) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_stream(os, packets);
}

std::vector<EscalatedPacket> load_stream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_stream(is);
}

void write_release_log(std::ostream& os, std::span<const ReleaseRecord> log) {
  auto t = [](std::uint64_t v) { return v == kNever ? std::string("-") : std::to_string(v); };
  os << "index,flow,seq,arrival_us,parsed_us,pooled_us,dispatched_us,result_us,release_us,class,final,full_pipeline\n";
  for (const auto& r : log)
    os << r.index << ',' << r.flow << ',' << r.seq << ',' << r.arrival << ',' << r.parsed << ',' << t(r.pooled) << ','
       << t(r.dispatched) << ',' << t(r.result) << ',' << r.release << ',' << r.cls << ',' << (r.final ? 1 : 0) << ','
       << (r.full_pipeline ? 1 : 0) << '\n';
}

}  // namespace wirenn::imis
