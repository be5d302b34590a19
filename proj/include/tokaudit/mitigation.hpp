#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tokaudit/corpus.hpp"
#include "tokaudit/patterns.hpp"
#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

// Occurrence counts of one token under secret vs normal tokenization, and
// the smoothed frequency ratio used for ranking.
struct GibberishScore {
    std::string token;
    int id = 0;
    std::uint64_t freq_secret = 0;
    std::uint64_t freq_normal = 0;
    double score = 0.0;  // (freq_secret + eps) / (freq_normal + eps)
};

// Token ids slated for removal, with the run metadata that produced them.
struct StripSet {
    std::vector<int> ids;  // sorted, unique
    nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
};

inline constexpr double kDefaultGibberishEpsilon = 0.5;

// Scores every non-base token of `vocab` by how much more often it appears
// when tokenizing the secret texts than the normal texts; returns the top_k
// by descending score (ties by token string). Tokens absent from both are
// excluded.
std::vector<GibberishScore> identify_gibberish(std::span<const std::string> normal_texts,
                                               std::span<const std::string> secret_texts,
                                               const Vocabulary& vocab,
                                               std::size_t top_k,
                                               double epsilon = kDefaultGibberishEpsilon);

std::vector<GibberishScore> identify_gibberish(const Corpus& normal_corpus,
                                               const Corpus& secret_corpus,
                                               const Vocabulary& vocab,
                                               std::size_t top_k,
                                               double epsilon = kDefaultGibberishEpsilon);

// Alternative two-tokenizer mode: trains one vocabulary per corpus and keeps
// candidates that the secret-trained vocabulary has but the normal-trained
// one lacks (intersected with `vocab` so the result is strippable); the kept
// candidates are then scored the same way as the shared-vocabulary mode.
std::vector<GibberishScore> identify_gibberish_vocab_diff(
    std::span<const std::string> normal_texts,
    std::span<const std::string> secret_texts,
    const Vocabulary& vocab,
    std::size_t top_k,
    double epsilon = kDefaultGibberishEpsilon,
    std::size_t trained_size = 0);  // 0: match vocab.size()

StripSet strip_set_from_scores(const std::vector<GibberishScore>& scores,
                               nlohmann::ordered_json provenance = {});

void save_strip_set(const StripSet& strip, const Vocabulary& vocab,
                    const std::filesystem::path& path);
StripSet load_strip_set(const std::filesystem::path& path);

std::string gibberish_to_csv(const std::vector<GibberishScore>& scores);

// Removes the stripped token<->id mappings, the merges that produce them,
// and transitively every merge that used a stripped token as a side (whose
// product is removed as well). Surviving ids are unchanged, leaving the id
// space sparse so downstream embedding rows stay aligned. Stripping a
// base-alphabet singleton is an error.
Vocabulary strip_tokens(const Vocabulary& vocab, const StripSet& strip);

// Character-wise encoding inside matched secret spans.
struct GuardedEncoding {
    std::vector<int> ids;
    struct Span {
        std::size_t offset = 0;  // bytes
        std::size_t length = 0;  // bytes
        std::string pattern_name;
    };
    std::vector<Span> spans;
};

// Scans `text` with the patterns; matched spans are encoded one token per
// character (byte tokens as fallback where a character has no single-char
// token), unmatched gaps are encoded normally with pre-token boundaries
// forced at the span edges.
GuardedEncoding guard_encode(const Vocabulary& vocab,
                             std::string_view text,
                             const std::vector<SecretPattern>& patterns);

}  // namespace tokaudit
