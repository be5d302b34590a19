#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tokaudit {

// ---- UTF-8 ----

// Decodes the scalar starting at `pos`, writes it to `cp` and returns the
// byte length consumed. Malformed sequences fall back to one byte per call.
std::size_t utf8_decode(std::string_view text, std::size_t pos, std::uint32_t& cp);

std::string utf8_encode(std::uint32_t cp);

// Splits text into unicode scalars, one string per scalar.
std::vector<std::string> utf8_scalars(std::string_view text);

// Number of unicode scalars (malformed bytes count as one each).
std::size_t utf8_length(std::string_view text);

// ---- Pre-tokenization ----

enum class PreTokenMode {
    WhitespaceKeepLeadingSpace,  // split on whitespace, glue one leading space onto the next piece
    None,                        // whole text is a single piece
};

struct PreTokenRules {
    PreTokenMode mode = PreTokenMode::WhitespaceKeepLeadingSpace;
    bool lowercase = false;

    bool operator==(const PreTokenRules&) const = default;
};

struct PieceSpan {
    std::size_t offset = 0;
    std::size_t length = 0;
};

// ASCII lowering; applied before partitioning when rules.lowercase is set.
std::string normalize_text(std::string_view text, const PreTokenRules& rules);

// Deterministic partition of (already normalized) text. Concatenating the
// spans in order reproduces the input exactly.
std::vector<PieceSpan> pretokenize_spans(std::string_view text, const PreTokenRules& rules);

std::vector<std::string> pretokenize(std::string_view text, const PreTokenRules& rules);

const char* pretoken_mode_name(PreTokenMode mode);
PreTokenMode pretoken_mode_from_name(std::string_view name);

}  // namespace tokaudit
