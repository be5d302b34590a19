#include "tokaudit/text.hpp"

#include <cctype>

#include "tokaudit/error.hpp"

namespace tokaudit {

std::size_t utf8_decode(std::string_view text, std::size_t pos, std::uint32_t& cp) {
    const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(text[i]); };
    const std::uint8_t c0 = byte(pos);
    if (c0 < 0x80) {
        cp = c0;
        return 1;
    }
    const auto cont = [&](std::size_t i) {
        return i < text.size() && (byte(i) & 0xC0) == 0x80;
    };
    if ((c0 >> 5) == 0x6 && cont(pos + 1)) {
        cp = (static_cast<std::uint32_t>(c0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
        return 2;
    }
    if ((c0 >> 4) == 0xE && cont(pos + 1) && cont(pos + 2)) {
        cp = (static_cast<std::uint32_t>(c0 & 0x0F) << 12) |
             (static_cast<std::uint32_t>(byte(pos + 1) & 0x3F) << 6) | (byte(pos + 2) & 0x3F);
        return 3;
    }
    if ((c0 >> 3) == 0x1E && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
        cp = (static_cast<std::uint32_t>(c0 & 0x07) << 18) |
             (static_cast<std::uint32_t>(byte(pos + 1) & 0x3F) << 12) |
             (static_cast<std::uint32_t>(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
        return 4;
    }
    cp = c0;  // malformed: treat as a single byte
    return 1;
}

std::string utf8_encode(std::uint32_t cp) {
    std::string out;
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
}

std::vector<std::string> utf8_scalars(std::string_view text) {
    std::vector<std::string> out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::uint32_t cp = 0;
        const std::size_t n = utf8_decode(text, pos, cp);
        out.emplace_back(text.substr(pos, n));
        pos += n;
    }
    return out;
}

std::size_t utf8_length(std::string_view text) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::uint32_t cp = 0;
        pos += utf8_decode(text, pos, cp);
        ++count;
    }
    return count;
}

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::string normalize_text(std::string_view text, const PreTokenRules& rules) {
    std::string out(text);
    if (rules.lowercase) {
        for (char& c : out) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

std::vector<PieceSpan> pretokenize_spans(std::string_view text, const PreTokenRules& rules) {
    std::vector<PieceSpan> spans;
    if (text.empty()) {
        return spans;
    }
    if (rules.mode == PreTokenMode::None) {
        spans.push_back({0, text.size()});
        return spans;
    }
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        if (is_ws(text[i])) {
            std::size_t j = i;
            while (j < n && is_ws(text[j])) {
                ++j;
            }
            if (j < n && text[j - 1] == ' ') {
                // The run's final space becomes the leading space of the
                // following piece.
                if (j - 1 > i) {
                    spans.push_back({i, j - 1 - i});
                }
                std::size_t k = j;
                while (k < n && !is_ws(text[k])) {
                    ++k;
                }
                spans.push_back({j - 1, k - (j - 1)});
                i = k;
            } else {
                spans.push_back({i, j - i});
                i = j;
            }
        } else {
            std::size_t k = i;
            while (k < n && !is_ws(text[k])) {
                ++k;
            }
            spans.push_back({i, k - i});
            i = k;
        }
    }
    return spans;
}

std::vector<std::string> pretokenize(std::string_view text, const PreTokenRules& rules) {
    std::vector<std::string> pieces;
    for (const PieceSpan& s : pretokenize_spans(text, rules)) {
        pieces.emplace_back(text.substr(s.offset, s.length));
    }
    return pieces;
}

const char* pretoken_mode_name(PreTokenMode mode) {
    switch (mode) {
        case PreTokenMode::WhitespaceKeepLeadingSpace:
            return "whitespace-keep-leading-space";
        case PreTokenMode::None:
            return "none";
    }
    return "none";
}

PreTokenMode pretoken_mode_from_name(std::string_view name) {
    if (name == "whitespace-keep-leading-space" || name == "whitespace") {
        return PreTokenMode::WhitespaceKeepLeadingSpace;
    }
    if (name == "none") {
        return PreTokenMode::None;
    }
    throw ValidationError("unknown pre-tokenization mode: " + std::string(name));
}

}  // namespace tokaudit
