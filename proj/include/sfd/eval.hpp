#ifndef SFD_EVAL_HPP
#define SFD_EVAL_HPP

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

/// Pixel-wise confusion counts; the positive class is "filament".
struct ConfusionMatrix {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
};

/// Counts prediction outcomes over roi (or every pixel if roi is null).
inline ConfusionMatrix confusion(const BinaryMask& pred, const BinaryMask& truth,
                                 const BinaryMask* roi = nullptr) {
  pred.require_same_dims(truth);
  if (roi) pred.require_same_dims(*roi);

  ConfusionMatrix m;
  const size_t n = pred.size();
  for (size_t i = 0; i < n; ++i) {
    if (roi && !roi->data()[i]) continue;
    const bool p = pred.data()[i] != 0;
    const bool t = truth.data()[i] != 0;
    if (p && t) ++m.tp;
    else if (p && !t) ++m.fp;
    else if (!p && t) ++m.fn;
    else ++m.tn;
  }
  return m;
}

/// AR = (TP+TN)/total, TPR = TP/(TP+FN). An empty positive class yields
/// TPR = 1.0 by convention (nothing to detect, nothing missed).
inline std::pair<double, double> metrics(const ConfusionMatrix& m) {
  if (m.total() == 0)
    throw Error(ErrorCode::InvalidArgument, "metrics of an empty confusion matrix");
  const double ar = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  const double tpr = (m.tp + m.fn) == 0
                         ? 1.0
                         : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return {ar, tpr};
}

inline double iou_of(const ConfusionMatrix& m) {
  const int64_t denom = m.tp + m.fp + m.fn;
  return denom == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(denom);
}

inline double dice_of(const ConfusionMatrix& m) {
  const int64_t denom = 2 * m.tp + m.fp + m.fn;
  return denom == 0 ? 1.0 : static_cast<double>(2 * m.tp) / static_cast<double>(denom);
}

/// Scores for one method on one image. iou/dice are reported as extras and
/// never gate anything.
struct MetricsReport {
  ConfusionMatrix matrix;
  double ar = 0.0;
  double tpr = 0.0;
  double iou = 0.0;
  double dice = 0.0;
  std::string method_name;
  std::string image_id;
  double wall_time_seconds = 0.0;

  static MetricsReport from_matrix(ConfusionMatrix m, std::string method,
                                   std::string image, double wall_seconds = 0.0) {
    MetricsReport r;
    r.matrix = m;
    const auto [ar, tpr] = metrics(m);
    r.ar = ar;
    r.tpr = tpr;
    r.iou = iou_of(m);
    r.dice = dice_of(m);
    r.method_name = std::move(method);
    r.image_id = std::move(image);
    r.wall_time_seconds = wall_seconds;
    return r;
  }
};

/// Rows sorted by AR descending, ties by TPR descending, then method name.
struct ComparisonTable {
  std::vector<MetricsReport> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os << "method,image_id,tp,fp,tn,fn,ar,tpr,iou,dice,wall_time_seconds\n";
    os << std::setprecision(10);
    for (const auto& r : rows)
      os << r.method_name << ',' << r.image_id << ',' << r.matrix.tp << ','
         << r.matrix.fp << ',' << r.matrix.tn << ',' << r.matrix.fn << ','
         << r.ar << ',' << r.tpr << ',' << r.iou << ',' << r.dice << ','
         << r.wall_time_seconds << '\n';
    return os.str();
  }

  std::string to_text() const {
    std::ostringstream os;
    os << std::left << std::setw(22) << "method" << std::setw(22) << "image"
       << std::right << std::setw(9) << "AR" << std::setw(9) << "TPR"
       << std::setw(9) << "IoU" << std::setw(11) << "time[s]" << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& r : rows)
      os << std::left << std::setw(22) << r.method_name << std::setw(22) << r.image_id
         << std::right << std::setw(9) << r.ar << std::setw(9) << r.tpr
         << std::setw(9) << r.iou << std::setw(11) << r.wall_time_seconds << '\n';
    return os.str();
  }
};

inline ComparisonTable compare_methods(std::vector<MetricsReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const MetricsReport& a, const MetricsReport& b) {
                     if (a.ar != b.ar) return a.ar > b.ar;
                     if (a.tpr != b.tpr) return a.tpr > b.tpr;
                     return a.method_name < b.method_name;
                   });
  return ComparisonTable{std::move(reports)};
}

}  // namespace sfd

#endif
