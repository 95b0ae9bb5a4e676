#pragma once

#include <span>
#include <utility>
#include <vector>

namespace twinmark {

enum class SampleLabel { Watermarked, Natural };

struct ScoredSample {
    SampleLabel label = SampleLabel::Natural;
    double statistic = 0.0;
    bool verdict = false;
};

struct ConfusionMetrics {
    double tpr = 0.0;
    double tnr = 0.0;
    double f1 = 0.0;
};

/// Predicts watermarked when statistic > threshold.
ConfusionMetrics confusion_metrics(std::span<const ScoredSample> samples, double threshold);

struct BestF1 {
    double f1 = 0.0;
    double threshold = 0.0;
};

/// Maximizes F1 over thresholds placed below the minimum and at midpoints
/// between consecutive distinct statistics; ties keep the lower threshold.
BestF1 best_f1(std::span<const ScoredSample> samples);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep from +inf down; tied statistics move both rates in one
/// step, and the area is trapezoidal.
RocCurve roc_auc(std::span<const ScoredSample> samples);

/// One-sample Kolmogorov-Smirnov statistic against U(0,1) and its asymptotic
/// p-value.
struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KsResult ks_uniform(std::span<const double> values);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};
MeanStd mean_std(std::span<const double> values);

} // namespace twinmark
