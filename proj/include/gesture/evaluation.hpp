#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <map>
#include <utility>

#include "gesture/skeleton.hpp"

namespace gesture {

/// Confusion counts with one row per (true gesture, view angle) and one
/// column per predicted gesture. Rows are ordered frontal first, then the
/// rotated views grouped by gesture.
class ConfusionTable {
 public:
  using Counts = std::array<long, kNumGestures>;
  struct RowKey {
    int label;
    double view_angle_deg;
    friend std::partial_ordering operator<=>(const RowKey& a, const RowKey& b) {
      const bool ra = a.view_angle_deg != 0.0;
      const bool rb = b.view_angle_deg != 0.0;
      if (ra != rb) return ra <=> rb;
      if (a.label != b.label) return a.label <=> b.label;
      return a.view_angle_deg <=> b.view_angle_deg;
    }
    friend bool operator==(const RowKey&, const RowKey&) = default;
  };

  void add(int true_label, double view_angle_deg, int predicted);

  long total() const;
  double accuracy() const;
  /// Accuracy over the rows with this view angle (NaN if none).
  double accuracy_at(double view_angle_deg) const;
  /// Accuracy per true gesture over all view angles (NaN where no samples).
  std::array<double, kNumGestures> per_class_accuracy() const;
  const std::map<RowKey, Counts>& rows() const noexcept { return rows_; }

  /// true_label,view_angle_deg,n,<one rate column per predicted gesture>
  void write_csv(std::ostream& out) const;
  /// Aligned text grid of percentages.
  void render(std::ostream& out) const;

 private:
  std::map<RowKey, Counts> rows_;
};

}  // namespace gesture
