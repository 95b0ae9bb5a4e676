#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace twinmark {

class EmbeddingTable;
class NGramModel;
struct ContextCounts;

struct EntropyConfig {
    std::size_t top_k = 64;
    std::size_t n_clusters = 10;
    int kmeans_iters = 25;
    std::uint64_t kmeans_seed = 0;
    double alpha = 1.0; // token-entropy gate, nats
    double beta = 0.5;  // semantic-entropy gate, nats

    void validate() const;
    bool operator==(const EntropyConfig&) const = default;
};

/// Shannon entropy in nats with 0 ln 0 = 0.
double token_entropy(std::span<const double> probs);

struct ClusterAssignment {
    std::vector<std::size_t> labels;
    std::vector<std::vector<double>> centroids;

    std::size_t clusters() const noexcept { return centroids.size(); }
};

/// Lloyd's algorithm from a seeded farthest-point start. Empty clusters are
/// reseeded with the point farthest from its centroid; with fewer distinct
/// points than `n` the number of clusters is reduced to the distinct count.
ClusterAssignment kmeans(const std::vector<std::vector<double>>& points, std::size_t n, int iters, std::uint64_t seed);

/// Ids of the k most probable tokens; ties go to the lower id.
std::vector<TokenId> top_k_tokens(std::span<const double> probs, std::size_t k);

/// Entropy of cluster masses for probabilities already restricted to the
/// candidate set, renormalized here.
double merged_entropy(std::span<const double> candidate_probs, std::span<const std::size_t> labels);

double semantic_entropy(std::span<const double> probs, const EmbeddingTable& embeddings, const EntropyConfig& cfg);

struct EntropyReading {
    double token_entropy = 0.0;
    double semantic_entropy = 0.0;
    bool apply_logits = false;   // H_TE > alpha
    bool apply_sampling = false; // H_SE < beta
};

EntropyReading entropy_gates(std::span<const double> probs, const EmbeddingTable& embeddings, const EntropyConfig& cfg);

/// Both entropies for a model context, memoized on the n-gram context the
/// model resolves to (the distribution depends on nothing else).
/// Thread-safe.
class EntropyMeter {
public:
    EntropyMeter(const NGramModel& model, const EmbeddingTable& embeddings, const EntropyConfig& cfg);

    EntropyReading read(TokenView context) const;
    EntropyReading read(TokenView context, std::span<const double> probs) const;
    const EntropyConfig& config() const noexcept { return cfg_; }

private:
    struct Pair {
        double te, se;
    };
    EntropyReading gate(Pair p) const;

    const NGramModel& model_;
    const EmbeddingTable& embeddings_;
    EntropyConfig cfg_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<const ContextCounts*, Pair> cache_;
};

} // namespace twinmark
