#include "twinmark/attacks.hpp"

#include "twinmark/embeddings.hpp"
#include "twinmark/keyed_random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twinmark {

const char* attack_name(AttackKind k) noexcept
{
    switch (k) {
    case AttackKind::WordDelete: return "word_delete";
    case AttackKind::WordSubRandom: return "word_sub_random";
    case AttackKind::WordSubEmbed: return "word_sub_embed";
    case AttackKind::CopyPaste: return "copy_paste";
    }
    return "?";
}

AttackKind parse_attack(const std::string& name)
{
    for (auto k : {AttackKind::WordDelete, AttackKind::WordSubRandom, AttackKind::WordSubEmbed, AttackKind::CopyPaste})
        if (name == attack_name(k)) return k;
    throw Error(ErrorCode::Config, "unknown attack kind '" + name + "'");
}

void AttackConfig::validate() const
{
    require(ratio >= 0.0 && ratio <= 1.0, ErrorCode::Config, "attack ratio must lie in [0,1]");
    if (kind == AttackKind::CopyPaste) {
        require(ratio > 0.0, ErrorCode::Config, "copy-paste retain ratio must lie in (0,1]");
        require(segments >= 1, ErrorCode::Config, "copy-paste needs at least one segment");
    }
}

namespace {

std::size_t count_for(double ratio, std::size_t length)
{
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(length)));
}

/// k distinct indices from [0, n), ascending.
std::vector<std::size_t> choose_sorted(std::size_t n, std::size_t k, Rng& rng)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

TokenSequence word_delete(TokenView tokens, double ratio, std::uint64_t seed)
{
    require(ratio >= 0.0 && ratio <= 1.0, ErrorCode::InvalidArgument, "deletion ratio must lie in [0,1]");
    Rng rng(seed);
    const auto drop = choose_sorted(tokens.size(), count_for(ratio, tokens.size()), rng);
    TokenSequence out;
    out.reserve(tokens.size() - drop.size());
    std::size_t d = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (d < drop.size() && drop[d] == i) {
            ++d;
            continue;
        }
        out.push_back(tokens[i]);
    }
    return out;
}

TokenId nearest_neighbor(const EmbeddingTable& embeddings, TokenId id)
{
    TokenId best = id == 0 ? 1 : 0;
    double best_sim = -2.0;
    for (TokenId j = 0; j < embeddings.vocab_size(); ++j) {
        if (j == id) continue;
        const double s = embeddings.cosine(id, j);
        if (s > best_sim) {
            best_sim = s;
            best = j;
        }
    }
    return best;
}

TokenSequence word_substitute(TokenView tokens, double ratio, SubstitutionMode mode, std::size_t vocab_size,
                              const EmbeddingTable* embeddings, std::uint64_t seed)
{
    require(ratio >= 0.0 && ratio <= 1.0, ErrorCode::InvalidArgument, "substitution ratio must lie in [0,1]");
    require(vocab_size >= 2, ErrorCode::InvalidArgument, "substitution needs |V| >= 2");
    require(mode == SubstitutionMode::Random || (embeddings != nullptr && !embeddings->empty()),
            ErrorCode::InvalidArgument, "embedding substitution needs an embedding table");
    Rng rng(seed);
    TokenSequence out(tokens.begin(), tokens.end());
    for (std::size_t pos : choose_sorted(tokens.size(), count_for(ratio, tokens.size()), rng)) {
        const TokenId orig = out[pos];
        if (mode == SubstitutionMode::Random) {
            auto r = static_cast<TokenId>(rng.below(vocab_size - 1));
            out[pos] = r >= orig ? r + 1 : r;
        } else {
            out[pos] = nearest_neighbor(*embeddings, orig);
        }
    }
    return out;
}

TokenSequence copy_paste(TokenView wm_tokens, TokenView human_tokens, double retain_ratio, std::size_t segments,
                         std::uint64_t seed)
{
    require(retain_ratio > 0.0 && retain_ratio <= 1.0, ErrorCode::InvalidArgument, "retain ratio must lie in (0,1]");
    require(segments >= 1, ErrorCode::InvalidArgument, "copy-paste needs at least one segment");
    const std::size_t kept = count_for(retain_ratio, wm_tokens.size());
    require(kept >= segments, ErrorCode::InvalidArgument, "too few retained tokens for the requested segments");
    require(human_tokens.size() + 1 >= segments, ErrorCode::InvalidArgument, "host text too short for the segments");

    Rng rng(seed);
    std::vector<std::size_t> sizes(segments, kept / segments);
    for (std::size_t i = 0; i < kept % segments; ++i) ++sizes[i];

    // Chunk sources: distribute the skipped watermark tokens over segments+1
    // gaps (stars and bars), so chunks stay in order and never overlap.
    const std::size_t skipped = wm_tokens.size() - kept;
    const auto bars = choose_sorted(skipped + segments, segments, rng);
    std::vector<std::size_t> starts(segments);
    std::size_t consumed = 0;
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t skip_before = bars[s] - s;
        starts[s] = skip_before + consumed;
        consumed += sizes[s];
    }

    const auto gaps = choose_sorted(human_tokens.size() + 1, segments, rng);
    TokenSequence out;
    out.reserve(human_tokens.size() + kept);
    std::size_t s = 0;
    for (std::size_t h = 0; h <= human_tokens.size(); ++h) {
        while (s < segments && gaps[s] == h) {
            out.insert(out.end(), wm_tokens.begin() + static_cast<std::ptrdiff_t>(starts[s]),
                       wm_tokens.begin() + static_cast<std::ptrdiff_t>(starts[s] + sizes[s]));
            ++s;
        }
        if (h < human_tokens.size()) out.push_back(human_tokens[h]);
    }
    return out;
}

TokenSequence apply_attack(TokenView tokens, const AttackConfig& cfg, std::size_t vocab_size,
                           const EmbeddingTable* embeddings, std::optional<TokenView> host)
{
    cfg.validate();
    switch (cfg.kind) {
    case AttackKind::WordDelete: return word_delete(tokens, cfg.ratio, cfg.seed);
    case AttackKind::WordSubRandom:
        return word_substitute(tokens, cfg.ratio, SubstitutionMode::Random, vocab_size, embeddings, cfg.seed);
    case AttackKind::WordSubEmbed:
        return word_substitute(tokens, cfg.ratio, SubstitutionMode::Embedding, vocab_size, embeddings, cfg.seed);
    case AttackKind::CopyPaste:
        require(host.has_value(), ErrorCode::InvalidArgument, "copy-paste needs a host text");
        return copy_paste(tokens, *host, cfg.ratio, cfg.segments, cfg.seed);
    }
    return TokenSequence(tokens.begin(), tokens.end());
}

} // namespace twinmark
