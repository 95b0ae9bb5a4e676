#include "twinmark/entropy.hpp"

#include "twinmark/embeddings.hpp"
#include "twinmark/keyed_random.hpp"
#include "twinmark/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace twinmark {

void EntropyConfig::validate() const
{
    require(top_k >= 2, ErrorCode::Config, "top_k must be >= 2");
    require(n_clusters >= 1 && n_clusters <= top_k, ErrorCode::Config, "n_clusters must lie in [1, top_k]");
    require(kmeans_iters >= 1, ErrorCode::Config, "kmeans_iters must be >= 1");
    require(!std::isnan(alpha) && !std::isnan(beta), ErrorCode::Config, "entropy thresholds must be numbers");
}

double token_entropy(std::span<const double> probs)
{
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return std::max(h, 0.0);
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

std::size_t nearest(std::span<const double> p, const std::vector<std::vector<double>>& centroids)
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = sq_dist(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace

ClusterAssignment kmeans(const std::vector<std::vector<double>>& points, std::size_t n, int iters, std::uint64_t seed)
{
    require(n >= 1, ErrorCode::InvalidArgument, "kmeans needs n >= 1");
    require(points.size() >= n, ErrorCode::InvalidArgument, "kmeans needs at least n points");
    const std::size_t m = points.size();
    const std::size_t dim = points.front().size();
    for (const auto& p : points) require(p.size() == dim, ErrorCode::LengthMismatch, "kmeans points differ in dimension");

    const std::size_t distinct = std::set<std::vector<double>>(points.begin(), points.end()).size();
    const std::size_t k = std::min(n, distinct);

    // Farthest-point start.
    std::vector<std::vector<double>> centroids;
    std::vector<double> min_d(m, std::numeric_limits<double>::infinity());
    std::size_t pick = bounded(mix64(seed), m);
    while (centroids.size() < k) {
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < m; ++i) min_d[i] = std::min(min_d[i], sq_dist(points[i], centroids.back()));
        pick = static_cast<std::size_t>(std::max_element(min_d.begin(), min_d.end()) - min_d.begin());
    }

    ClusterAssignment out;
    out.labels.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) out.labels[i] = nearest(points[i], centroids);

    for (int it = 0; it < iters; ++it) {
        // Update.
        std::vector<std::size_t> size(k, 0);
        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            ++size[out.labels[i]];
            for (std::size_t d = 0; d < dim; ++d) next[out.labels[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (size[c] > 0)
                for (auto& v : next[c]) v /= static_cast<double>(size[c]);

        // Repair empties.
        for (std::size_t c = 0; c < k; ++c) {
            if (size[c] > 0) continue;
            std::size_t far = m;
            double far_d = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (size[out.labels[i]] < 2) continue;
                const double d = sq_dist(points[i], next[out.labels[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == m) break;
            --size[out.labels[far]];
            out.labels[far] = c;
            size[c] = 1;
            next[c] = points[far];
        }
        centroids = std::move(next);

        // Assign.
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t c = nearest(points[i], centroids);
            if (c != out.labels[i]) {
                out.labels[i] = c;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Final centroids consistent with the labels; drop clusters left empty.
    std::vector<std::size_t> size(k, 0);
    for (auto l : out.labels) ++size[l];
    std::vector<std::size_t> remap(k, 0);
    std::size_t live = 0;
    for (std::size_t c = 0; c < k; ++c) remap[c] = size[c] > 0 ? live++ : k;
    out.centroids.assign(live, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        out.labels[i] = remap[out.labels[i]];
        for (std::size_t d = 0; d < dim; ++d) out.centroids[out.labels[i]][d] += points[i][d];
    }
    for (std::size_t c = 0; c < live; ++c) {
        const auto count = static_cast<double>(std::count(out.labels.begin(), out.labels.end(), c));
        for (auto& v : out.centroids[c]) v /= count;
    }
    return out;
}

std::vector<TokenId> top_k_tokens(std::span<const double> probs, std::size_t k)
{
    k = std::min(k, probs.size());
    std::vector<TokenId> ids(probs.size());
    std::iota(ids.begin(), ids.end(), TokenId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), [&](TokenId a, TokenId b) {
        return probs[a] != probs[b] ? probs[a] > probs[b] : a < b;
    });
    ids.resize(k);
    return ids;
}

double merged_entropy(std::span<const double> candidate_probs, std::span<const std::size_t> labels)
{
    require(candidate_probs.size() == labels.size(), ErrorCode::LengthMismatch, "one label per candidate required");
    const double total = std::accumulate(candidate_probs.begin(), candidate_probs.end(), 0.0);
    require(total > 0.0, ErrorCode::InvalidArgument, "candidate probabilities sum to zero");
    const std::size_t n = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> q(n, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) q[labels[i]] += candidate_probs[i] / total;
    return token_entropy(q);
}

double semantic_entropy(std::span<const double> probs, const EmbeddingTable& embeddings, const EntropyConfig& cfg)
{
    cfg.validate();
    require(embeddings.vocab_size() == probs.size(), ErrorCode::LengthMismatch,
            "embedding table does not cover the distribution");
    const auto top = top_k_tokens(probs, cfg.top_k);
    std::vector<double> cand(top.size());
    std::vector<std::vector<double>> points(top.size());
    for (std::size_t i = 0; i < top.size(); ++i) {
        cand[i] = probs[top[i]];
        auto v = embeddings.vector(top[i]);
        points[i].assign(v.begin(), v.end());
    }
    const auto clusters = kmeans(points, std::min(cfg.n_clusters, top.size()), cfg.kmeans_iters, cfg.kmeans_seed);
    return merged_entropy(cand, clusters.labels);
}

EntropyReading entropy_gates(std::span<const double> probs, const EmbeddingTable& embeddings, const EntropyConfig& cfg)
{
    EntropyReading r;
    r.token_entropy = token_entropy(probs);
    r.semantic_entropy = semantic_entropy(probs, embeddings, cfg);
    r.apply_logits = r.token_entropy > cfg.alpha;
    r.apply_sampling = r.semantic_entropy < cfg.beta;
    return r;
}

EntropyMeter::EntropyMeter(const NGramModel& model, const EmbeddingTable& embeddings, const EntropyConfig& cfg)
    : model_(model), embeddings_(embeddings), cfg_(cfg)
{
    cfg_.validate();
    require(embeddings.vocab_size() == model.vocab_size(), ErrorCode::LengthMismatch,
            "embedding table and model disagree on vocabulary size");
}

EntropyReading EntropyMeter::gate(Pair p) const
{
    return {p.te, p.se, p.te > cfg_.alpha, p.se < cfg_.beta};
}

EntropyReading EntropyMeter::read(TokenView context) const
{
    const ContextCounts* key = &model_.lookup(context);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return gate(it->second);
    }
    return read(context, model_.probabilities(context));
}

EntropyReading EntropyMeter::read(TokenView context, std::span<const double> probs) const
{
    const ContextCounts* key = &model_.lookup(context);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return gate(it->second);
    }
    const Pair p{token_entropy(probs), semantic_entropy(probs, embeddings_, cfg_)};
    std::lock_guard lock(mutex_);
    cache_.emplace(key, p);
    return gate(p);
}

} // namespace twinmark
