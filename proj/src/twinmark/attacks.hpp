#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace twinmark {

class EmbeddingTable;

enum class AttackKind { WordDelete, WordSubRandom, WordSubEmbed, CopyPaste };

const char* attack_name(AttackKind k) noexcept;
AttackKind parse_attack(const std::string& name);

struct AttackConfig {
    AttackKind kind = AttackKind::WordDelete;
    double ratio = 0.3; // deleted/substituted fraction, or retained fraction for copy-paste
    std::size_t segments = 3;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const AttackConfig&) const = default;
};

/// Removes floor(ratio*L) uniformly chosen positions; survivors keep order.
TokenSequence word_delete(TokenView tokens, double ratio, std::uint64_t seed);

enum class SubstitutionMode { Random, Embedding };

/// Replaces floor(ratio*L) positions: uniformly from V \ {original}, or with
/// the original's nearest cosine neighbour.
TokenSequence word_substitute(TokenView tokens, double ratio, SubstitutionMode mode, std::size_t vocab_size,
                              const EmbeddingTable* embeddings, std::uint64_t seed);

/// Keeps floor(retain_ratio*L_wm) watermarked tokens as `segments` contiguous
/// chunks and inserts them, in order, at distinct random gaps of the host text.
TokenSequence copy_paste(TokenView wm_tokens, TokenView human_tokens, double retain_ratio, std::size_t segments,
                         std::uint64_t seed);

/// Nearest cosine neighbour of `id` other than itself (lowest id on ties).
TokenId nearest_neighbor(const EmbeddingTable& embeddings, TokenId id);

/// Dispatches on `cfg.kind`; copy-paste needs `host`.
TokenSequence apply_attack(TokenView tokens, const AttackConfig& cfg, std::size_t vocab_size,
                           const EmbeddingTable* embeddings, std::optional<TokenView> host = std::nullopt);

} // namespace twinmark
