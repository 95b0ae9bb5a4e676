#include "twinmark/ngram.hpp"

#include "twinmark/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace twinmark {

NGramModel::NGramModel(std::size_t vocab_size, int order, double lambda, Table table)
    : vocab_size_(vocab_size), order_(order), lambda_(lambda), table_(std::move(table))
{
    require(vocab_size_ >= 2, ErrorCode::InvalidArgument, "vocabulary must hold at least 2 tokens");
    require(order_ >= 1, ErrorCode::InvalidArgument, "n-gram order must be >= 1");
    require(lambda_ > 0.0 && std::isfinite(lambda_), ErrorCode::InvalidArgument, "smoothing lambda must be > 0");
    require(table_.contains(TokenSequence{}), ErrorCode::Format, "n-gram table lacks unigram counts");
}

NGramModel NGramModel::train(TokenView corpus, std::size_t vocab_size, int order, double lambda)
{
    require(order >= 1, ErrorCode::InvalidArgument, "n-gram order must be >= 1");
    require(lambda > 0.0, ErrorCode::InvalidArgument, "smoothing lambda must be > 0");
    require(corpus.size() > static_cast<std::size_t>(order), ErrorCode::CorpusTooShort,
            "training corpus needs more than `order` tokens");
    validate_sequence(corpus, vocab_size);

    std::map<TokenSequence, std::unordered_map<TokenId, std::uint32_t>> raw;
    TokenSequence key;
    for (std::size_t t = 0; t < corpus.size(); ++t) {
        for (int m = 0; m <= order && static_cast<std::size_t>(m) <= t; ++m) {
            key.assign(corpus.begin() + static_cast<std::ptrdiff_t>(t - m), corpus.begin() + static_cast<std::ptrdiff_t>(t));
            ++raw[key][corpus[t]];
        }
    }

    Table table;
    for (auto& [ctx, succ] : raw) {
        ContextCounts cc;
        cc.successors.assign(succ.begin(), succ.end());
        std::sort(cc.successors.begin(), cc.successors.end());
        for (const auto& s : cc.successors) cc.total += s.second;
        table.emplace(ctx, std::move(cc));
    }
    return NGramModel(vocab_size, order, lambda, std::move(table));
}

std::size_t NGramModel::resolved_order(TokenView context) const
{
    const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order_), context.size());
    TokenSequence key;
    for (std::size_t m = longest; m > 0; --m) {
        key.assign(context.end() - static_cast<std::ptrdiff_t>(m), context.end());
        if (table_.contains(key)) return m;
    }
    return 0;
}

const ContextCounts& NGramModel::lookup(TokenView context) const
{
    const std::size_t m = resolved_order(context);
    TokenSequence key(context.end() - static_cast<std::ptrdiff_t>(m), context.end());
    return table_.at(key);
}

std::vector<double> NGramModel::probabilities(TokenView context) const
{
    const auto& cc = lookup(context);
    const double denom = static_cast<double>(cc.total) + lambda_ * static_cast<double>(vocab_size_);
    std::vector<double> p(vocab_size_, lambda_ / denom);
    for (const auto& [id, count] : cc.successors) p[id] = (count + lambda_) / denom;
    return p;
}

std::vector<double> NGramModel::logits(TokenView context) const
{
    auto l = probabilities(context);
    for (auto& v : l) v = std::log(v);
    return l;
}

double NGramModel::probability(TokenView context, TokenId next) const
{
    const auto& cc = lookup(context);
    const double denom = static_cast<double>(cc.total) + lambda_ * static_cast<double>(vocab_size_);
    auto it = std::lower_bound(cc.successors.begin(), cc.successors.end(), std::pair<TokenId, std::uint32_t>{next, 0});
    const double count = (it != cc.successors.end() && it->first == next) ? it->second : 0.0;
    return (count + lambda_) / denom;
}

double perplexity(const NGramModel& model, TokenView text, TokenView history)
{
    require(!text.empty(), ErrorCode::SequenceTooShort, "perplexity of empty text is undefined");
    validate_sequence(text, model.vocab_size());
    TokenSequence ctx(history.begin(), history.end());
    double nll = 0.0;
    for (TokenId y : text) {
        nll -= std::log(model.probability(ctx, y));
        ctx.push_back(y);
    }
    return std::exp(nll / static_cast<double>(text.size()));
}

} // namespace twinmark
