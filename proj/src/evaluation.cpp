#include "gesture/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "gesture/error.hpp"

namespace gesture {

namespace {

long row_total(const ConfusionTable::Counts& c) { return std::accumulate(c.begin(), c.end(), 0L); }

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

void ConfusionTable::add(int true_label, double view_angle_deg, int predicted) {
  if (true_label < 0 || true_label >= kNumGestures || predicted < 0 || predicted >= kNumGestures) {
    throw Error(ErrorCode::LabelOutOfRange, "confusion table label out of range");
  }
  auto [it, inserted] = rows_.try_emplace(RowKey{true_label, view_angle_deg}, Counts{});
  ++it->second[static_cast<std::size_t>(predicted)];
}

long ConfusionTable::total() const {
  long n = 0;
  for (const auto& [key, counts] : rows_) n += row_total(counts);
  return n;
}

double ConfusionTable::accuracy() const {
  long correct = 0;
  for (const auto& [key, counts] : rows_) correct += counts[static_cast<std::size_t>(key.label)];
  const long n = total();
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(correct) / n;
}

double ConfusionTable::accuracy_at(double view_angle_deg) const {
  long correct = 0;
  long n = 0;
  for (const auto& [key, counts] : rows_) {
    if (key.view_angle_deg != view_angle_deg) continue;
    correct += counts[static_cast<std::size_t>(key.label)];
    n += row_total(counts);
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(correct) / n;
}

std::array<double, kNumGestures> ConfusionTable::per_class_accuracy() const {
  std::array<long, kNumGestures> correct{};
  std::array<long, kNumGestures> n{};
  for (const auto& [key, counts] : rows_) {
    const auto l = static_cast<std::size_t>(key.label);
    correct[l] += counts[l];
    n[l] += row_total(counts);
  }
  std::array<double, kNumGestures> out{};
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = n[l] == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(correct[l]) / n[l];
  }
  return out;
}

void ConfusionTable::write_csv(std::ostream& out) const {
  out << "true_label,view_angle_deg,n";
  for (GestureLabel g : kAllGestures) out << ',' << to_string(g);
  out << '\n';
  for (const auto& [key, counts] : rows_) {
    const long n = row_total(counts);
    out << to_string(label_from_index(key.label)) << ',' << format("%g", key.view_angle_deg) << ',' << n;
    for (long c : counts) out << ',' << format("%.6f", static_cast<double>(c) / n);
    out << '\n';
  }
}

void ConfusionTable::render(std::ostream& out) const {
  constexpr int kNameWidth = 28;
  std::string header(kNameWidth, ' ');
  for (int j = 0; j < kNumGestures; ++j) header += format("%6.0f", j);
  out << header << "   (columns: predicted class index)\n";
  for (const auto& [key, counts] : rows_) {
    std::string name = std::string(to_string(label_from_index(key.label))) + " " +
                       format("%+g", key.view_angle_deg);
    name.resize(kNameWidth, ' ');
    out << name;
    const long n = row_total(counts);
    for (long c : counts) out << format("%6.1f", 100.0 * static_cast<double>(c) / n);
    out << '\n';
  }
  for (int j = 0; j < kNumGestures; ++j) out << "  " << j << " = " << to_string(label_from_index(j)) << '\n';
}

}  // namespace gesture
