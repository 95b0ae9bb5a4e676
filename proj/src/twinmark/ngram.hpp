#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace twinmark {

/// Successor counts observed after one context.
struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint32_t>> successors; // sorted by id

    bool operator==(const ContextCounts&) const = default;
};

/// Additively smoothed n-gram model. A query uses the longest suffix of the
/// context (at most `order` tokens) that was observed during training, so an
/// unseen context backs off to shorter ones and finally to the unigram table.
/// Within the chosen context, P(w) = (count(w) + lambda) / (total + lambda*|V|).
class NGramModel {
public:
    using Table = std::map<TokenSequence, ContextCounts>;

    NGramModel() = default;
    NGramModel(std::size_t vocab_size, int order, double lambda, Table table);

    static NGramModel train(TokenView corpus, std::size_t vocab_size, int order, double lambda);

    std::size_t vocab_size() const noexcept { return vocab_size_; }
    int order() const noexcept { return order_; }
    double lambda() const noexcept { return lambda_; }
    const Table& table() const noexcept { return table_; }

    /// The counts backing a query for `context`; never null after training.
    const ContextCounts& lookup(TokenView context) const;
    /// Length of the context suffix a query for `context` resolves to.
    std::size_t resolved_order(TokenView context) const;

    std::vector<double> probabilities(TokenView context) const;
    /// Natural-log probabilities.
    std::vector<double> logits(TokenView context) const;
    double probability(TokenView context, TokenId next) const;

    bool operator==(const NGramModel&) const = default;

private:
    std::size_t vocab_size_ = 0;
    int order_ = 0;
    double lambda_ = 0.0;
    Table table_;
};

/// exp(-(1/L) * sum ln P(y_t | history)). `history` is prepended as context
/// and not scored.
double perplexity(const NGramModel& model, TokenView text, TokenView history = {});

} // namespace twinmark
