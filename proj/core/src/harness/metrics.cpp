#include "wirenn/harness/metrics.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wirenn::harness {

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_(n_classes) {
  if (n_classes < 0) throw std::invalid_argument("confusion matrix: negative class count");
  cells_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  if (truth < 0 || truth >= n_ || predicted < 0 || predicted >= n_)
    throw std::out_of_range("confusion matrix: class out of range (" + std::to_string(truth) + ", " +
                            std::to_string(predicted) + ")");
  cells_[static_cast<std::size_t>(truth) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(predicted)] += count;
  total_ += count;
}

std::uint64_t ConfusionMatrix::at(int truth, int predicted) const {
  return cells_.at(static_cast<std::size_t>(truth) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(predicted));
}

double ConfusionMatrix::precision(int c) const {
  std::uint64_t col = 0;
  for (int t = 0; t < n_; ++t) col += at(t, c);
  return col == 0 ? 0.0 : static_cast<double>(at(c, c)) / static_cast<double>(col);
}

double ConfusionMatrix::recall(int c) const {
  std::uint64_t row = 0;
  for (int p = 0; p < n_; ++p) row += at(c, p);
  return row == 0 ? 0.0 : static_cast<double>(at(c, c)) / static_cast<double>(row);
}

double ConfusionMatrix::f1(int c) const {
  const double p = precision(c), r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double ConfusionMatrix::macro_f1() const {
  double sum = 0;
  int present = 0;
  for (int c = 0; c < n_; ++c) {
    std::uint64_t touch = 0;
    for (int k = 0; k < n_; ++k) touch += at(c, k) + at(k, c);
    if (touch == 0) continue;
    sum += f1(c);
    ++present;
  }
  return present == 0 ? 0.0 : sum / present;
}

double ConfusionMatrix::accuracy() const {
  if (total_ == 0) return 0.0;
  std::uint64_t diag = 0;
  for (int c = 0; c < n_; ++c) diag += at(c, c);
  return static_cast<double>(diag) / static_cast<double>(total_);
}

void write_metrics(std::ostream& os, const MetricsReport& r) {
  const auto& pc = r.packet_counts;
  os << "packets " << r.packets << "\n"
     << "  rnn " << pc.rnn << "\n"
     << "  pre_analysis " << pc.pre_analysis << "\n"
     << "  fallback " << pc.fallback << "\n"
     << "  escalated " << pc.escalated << "\n"
     << "  ambiguous " << r.ambiguous_packets << "\n"
     << "  resets " << r.resets << "\n"
     << "flows " << r.flows << "\n"
     << "  rnn " << r.rnn_flows << "\n"
     << "  with_fallback " << r.flows_with_fallback << "\n"
     << "  escalated " << r.escalated_flows << "\n";
  if (r.confusion.total() == 0) return;
  os << std::fixed << std::setprecision(4) << "macro_f1 " << r.confusion.macro_f1() << "\n"
     << "accuracy " << r.confusion.accuracy() << "\n"
     << "class precision recall f1\n";
  for (int c = 0; c < r.confusion.n_classes(); ++c)
    os << c << ' ' << r.confusion.precision(c) << ' ' << r.confusion.recall(c) << ' ' << r.confusion.f1(c) << "\n";
}

}  // namespace wirenn::harness
