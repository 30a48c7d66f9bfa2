#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wirenn/argmax/ternary.hpp"
#include "wirenn/error.hpp"

namespace wirenn::argmax {

void write_table(std::ostream& os, const TernaryTable& table) {
  os << table.n() << ' ' << table.m() << ' ';
  for (std::size_t i = 0; i < table.tie_order().size(); ++i) {
    if (i) os << ',';
    os << table.tie_order()[i];
  }
  os << ' ' << to_string(table.level()) << '\n';
  for (const auto& e : table.entries()) {
    os << e.priority << ' ';
    for (const auto& seg : e.key) os << ' ' << seg.to_string(table.m());
    os << "  " << e.winner << '\n';
  }
}

TernaryTable read_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("argmax table: missing header");
  std::istringstream header(line);
  int n = 0, m = 0;
  std::string order_text, level_text;
  if (!(header >> n >> m >> order_text >> level_text))
    throw FormatError("argmax table: malformed header '" + line + "'");
  if (n < 1 || m < 1 || m > kMaxBits) throw FormatError("argmax table: bad n/m in header");

  std::vector<int> order;
  std::istringstream order_stream(order_text);
  for (std::string tok; std::getline(order_stream, tok, ',');) order.push_back(std::stoi(tok));
  const OptLevel level = parse_opt_level(level_text);

  std::vector<TernaryEntry> entries;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    TernaryEntry e;
    if (!(row >> e.priority)) throw FormatError("argmax table: bad priority in '" + line + "'");
    e.key.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::string trits;
      if (!(row >> trits)) throw FormatError("argmax table: short entry '" + line + "'");
      if (trits.size() != static_cast<std::size_t>(m))
        throw FormatError("argmax table: segment width mismatch in '" + line + "'");
      e.key.push_back(TritSegment::parse(trits));
    }
    if (!(row >> e.winner)) throw FormatError("argmax table: missing winner in '" + line + "'");
    std::string extra;
    if (row >> extra) throw FormatError("argmax table: trailing data in '" + line + "'");
    if (e.priority != entries.size())
      throw FormatError("argmax table: priorities must be consecutive from 0");
    entries.push_back(std::move(e));
  }
  try {
    return TernaryTable(n, m, std::move(order), level, std::move(entries));
  } catch (const std::invalid_argument& ex) {
    throw FormatError(std::string("argmax table: ") + ex.what());
  }
}

std::string dump_table(const TernaryTable& table) {
  std::ostringstream os;
  write_table(os, table);
  return os.str();
}

TernaryTable parse_table(const std::string& text) {
  std::istringstream is(text);
  return read_table(is);
}

}  // namespace wirenn::argmax
