#include "twinmark/metrics.hpp"

#include "twinmark/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace twinmark {

namespace {

struct ClassCounts {
    std::size_t pos = 0, neg = 0;
};

ClassCounts count_classes(std::span<const ScoredSample> samples)
{
    ClassCounts c;
    for (const auto& s : samples) {
        require(std::isfinite(s.statistic), ErrorCode::InvalidArgument, "sample statistic must be finite");
        (s.label == SampleLabel::Watermarked ? c.pos : c.neg)++;
    }
    require(c.pos > 0, ErrorCode::InvalidArgument, "no watermarked samples: TPR undefined");
    require(c.neg > 0, ErrorCode::InvalidArgument, "no natural samples: TNR undefined");
    return c;
}

double f1_from(std::size_t tp, std::size_t fp, std::size_t fn)
{
    const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp) + static_cast<double>(fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

} // namespace

ConfusionMetrics confusion_metrics(std::span<const ScoredSample> samples, double threshold)
{
    const auto c = count_classes(samples);
    std::size_t tp = 0, tn = 0;
    for (const auto& s : samples) {
        const bool predicted = s.statistic > threshold;
        if (s.label == SampleLabel::Watermarked && predicted) ++tp;
        if (s.label == SampleLabel::Natural && !predicted) ++tn;
    }
    ConfusionMetrics m;
    m.tpr = static_cast<double>(tp) / static_cast<double>(c.pos);
    m.tnr = static_cast<double>(tn) / static_cast<double>(c.neg);
    m.f1 = f1_from(tp, c.neg - tn, c.pos - tp);
    return m;
}

BestF1 best_f1(std::span<const ScoredSample> samples)
{
    const auto c = count_classes(samples);
    std::vector<ScoredSample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.statistic < b.statistic; });

    // Everything predicted positive first, then raise the threshold past each
    // distinct value in ascending order.
    std::size_t tp = c.pos, fp = c.neg;
    BestF1 best{f1_from(tp, fp, 0), sorted.front().statistic - 1.0};
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].statistic == sorted[i].statistic) {
            (sorted[j].label == SampleLabel::Watermarked ? tp : fp)--;
            ++j;
        }
        if (j == sorted.size()) break;
        const double f1 = f1_from(tp, fp, c.pos - tp);
        if (f1 > best.f1) best = {f1, 0.5 * (sorted[i].statistic + sorted[j].statistic)};
        i = j;
    }
    return best;
}

RocCurve roc_auc(std::span<const ScoredSample> samples)
{
    const auto c = count_classes(samples);
    std::vector<ScoredSample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.statistic > b.statistic; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::uint64_t tp = 0, fp = 0;
    std::uint64_t twice_area = 0; // in units of 1 / (pos * neg)
    for (std::size_t i = 0; i < sorted.size();) {
        const std::uint64_t tp0 = tp, fp0 = fp;
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].statistic == sorted[i].statistic) {
            (sorted[j].label == SampleLabel::Watermarked ? tp : fp)++;
            ++j;
        }
        twice_area += (fp - fp0) * (tp + tp0);
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(c.neg),
                              static_cast<double>(tp) / static_cast<double>(c.pos)});
        i = j;
    }
    roc.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(c.pos) * static_cast<double>(c.neg));
    return roc;
}

KsResult ks_uniform(std::span<const double> values)
{
    require(!values.empty(), ErrorCode::InvalidArgument, "KS test needs at least one value");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = std::clamp(x[i], 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - v, v - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double p = 0.0;
    if (lambda < 1e-3) {
        p = 1.0;
    } else {
        for (int k = 1; k <= 100; ++k) {
            const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
            p += term;
            if (std::fabs(term) < 1e-12) break;
        }
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

MeanStd mean_std(std::span<const double> values)
{
    require(values.size() >= 2, ErrorCode::InvalidArgument, "need at least two values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

} // namespace twinmark
