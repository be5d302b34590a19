#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokaudit/text.hpp"

namespace tokaudit {

struct MergeRule {
    std::string left;
    std::string right;
    int rank = 0;

    bool operator==(const MergeRule&) const = default;
};

// Token ids plus the fingerprint of the vocabulary that produced them.
struct TokenSequence {
    std::vector<int> ids;
    std::string vocab_fingerprint;
};

// Scalar vocabularies use unicode scalars as atomic symbols and can only
// encode text drawn from their base alphabet. Byte vocabularies use the
// GPT-2 byte-to-unicode proxy alphabet, so any byte sequence is encodable;
// imported hub tokenizers are of this kind.
enum class SymbolLevel { Scalar, Byte };

// Immutable BPE vocabulary: ordered base alphabet, ranked merge rules, and
// the token<->id maps. Construction validates all structural invariants;
// afterwards the object is safe to share across concurrent readers.
class Vocabulary {
public:
    Vocabulary(SymbolLevel level,
               std::vector<std::string> base_alphabet,
               std::vector<MergeRule> merges,
               std::unordered_map<std::string, int> token_to_id,
               PreTokenRules pretoken,
               std::string note = "");

    SymbolLevel level() const { return level_; }
    const std::vector<std::string>& base_alphabet() const { return base_alphabet_; }
    const std::vector<MergeRule>& merges() const { return merges_; }
    const std::unordered_map<std::string, int>& token_to_id() const { return token_to_id_; }
    const std::map<int, std::string>& id_to_token() const { return id_to_token_; }
    const PreTokenRules& pretoken() const { return pretoken_; }
    const std::string& fingerprint() const { return fingerprint_; }
    const std::string& note() const { return note_; }
    std::size_t size() const { return token_to_id_.size(); }

    std::optional<int> id_of(std::string_view token) const;
    const std::string* token_of(int id) const;
    bool is_base_token(int id) const;

    TokenSequence encode(std::string_view text) const;
    TokenSequence encode(std::string_view text, const PreTokenRules& rules) const;
    // Segments one pre-token piece, bypassing pre-tokenization.
    std::vector<int> encode_piece(std::string_view piece) const;

    std::string decode(std::span<const int> ids) const;
    std::string decode(const TokenSequence& seq) const;
    std::string decode_token(int id) const;

    // Character count of the decoded token.
    std::size_t token_char_length(int id) const;

    bool structurally_equal(const Vocabulary& other) const;

private:
    void validate() const;
    void build_tables();
    std::string compute_fingerprint() const;
    std::vector<int> initial_ids(std::string_view piece, std::size_t text_offset) const;
    void merge_ids(std::vector<int>& ids) const;

    SymbolLevel level_;
    std::vector<std::string> base_alphabet_;
    std::vector<MergeRule> merges_;
    std::unordered_map<std::string, int> token_to_id_;
    std::map<int, std::string> id_to_token_;
    PreTokenRules pretoken_;
    std::string note_;
    std::string fingerprint_;

    struct MergeTarget {
        int rank;
        int merged_id;
    };
    std::unordered_map<std::uint64_t, MergeTarget> merge_map_;  // key = packed (left id, right id)
    std::array<int, 256> byte_token_ids_{};                     // SymbolLevel::Byte only
};

// ---- GPT-2 byte-level proxy alphabet ----

// Proxy string (one unicode scalar) standing for a raw byte.
const std::string& byte_to_proxy(std::uint8_t b);
// Inverse mapping; nullopt for codepoints outside the proxy alphabet.
std::optional<std::uint8_t> proxy_to_byte(std::uint32_t cp);
std::string bytes_to_proxy_string(std::string_view bytes);
// Proxy scalars outside the alphabet pass through as raw UTF-8.
std::string proxy_string_to_bytes(std::string_view proxy);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace tokaudit
