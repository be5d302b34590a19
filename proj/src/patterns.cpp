#include "tokaudit/patterns.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"
#include "tokaudit/rng.hpp"
#include "tokaudit/text.hpp"

namespace tokaudit {

namespace {

constexpr std::uint32_t kMaxRangeSpan = 1 << 16;

bool needs_escape(std::uint32_t cp) {
    switch (cp) {
        case '\\': case '-': case '.': case '[': case ']': case '{': case '}':
        case '(': case ')': case '*': case '+': case '?': case '|': case '^':
        case '$': case '/':
            return true;
        default:
            return false;
    }
}

// Scalar after a backslash; only literal-character escapes are allowed.
std::string parse_escape(std::string_view regex, std::size_t& pos) {
    ++pos;  // consume the backslash
    if (pos >= regex.size()) {
        throw ValidationError("dangling escape at end of pattern");
    }
    std::uint32_t cp = 0;
    const std::size_t n = utf8_decode(regex, pos, cp);
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) {
        // letter escapes are shorthand classes (\d, \w, \s, ...), not literals
        throw UnsupportedConstructError(std::string("\\") + static_cast<char>(cp));
    }
    std::string out(regex.substr(pos, n));
    pos += n;
    return out;
}

std::vector<std::string> parse_class(std::string_view regex, std::size_t& pos) {
    ++pos;  // consume '['
    std::vector<std::string> symbols;
    std::unordered_set<std::string> seen;
    const auto push_symbol = [&](const std::string& s) {
        if (seen.insert(s).second) {
            symbols.push_back(s);
        }
    };
    // pending holds the last single character, available as a range start.
    std::string pending;
    bool has_pending = false;
    const auto flush_pending = [&] {
        if (has_pending) {
            push_symbol(pending);
            has_pending = false;
        }
    };
    while (true) {
        if (pos >= regex.size()) {
            throw ValidationError("unterminated character class");
        }
        if (regex[pos] == ']') {
            ++pos;
            flush_pending();
            break;
        }
        if (regex[pos] == '-' && has_pending && pos + 1 < regex.size() && regex[pos + 1] != ']') {
            ++pos;  // consume '-'
            std::string end_sym;
            if (regex[pos] == '\\') {
                end_sym = parse_escape(regex, pos);
            } else {
                std::uint32_t cp = 0;
                const std::size_t n = utf8_decode(regex, pos, cp);
                end_sym = regex.substr(pos, n);
                pos += n;
            }
            std::uint32_t lo = 0;
            std::uint32_t hi = 0;
            utf8_decode(pending, 0, lo);
            utf8_decode(end_sym, 0, hi);
            if (lo > hi) {
                throw ValidationError("reversed character range " + pending + "-" + end_sym);
            }
            if (hi - lo > kMaxRangeSpan) {
                throw ValidationError("character range " + pending + "-" + end_sym + " too wide");
            }
            for (std::uint32_t cp = lo; cp <= hi; ++cp) {
                push_symbol(utf8_encode(cp));
            }
            has_pending = false;
            continue;
        }
        flush_pending();
        if (regex[pos] == '\\') {
            pending = parse_escape(regex, pos);
        } else {
            std::uint32_t cp = 0;
            const std::size_t n = utf8_decode(regex, pos, cp);
            pending = regex.substr(pos, n);
            pos += n;
        }
        has_pending = true;
    }
    if (symbols.empty()) {
        throw ValidationError("empty character class");
    }
    return symbols;
}

std::size_t parse_quantifier(std::string_view regex, std::size_t& pos) {
    ++pos;  // consume '{'
    std::size_t value = 0;
    bool any = false;
    while (pos < regex.size() && regex[pos] >= '0' && regex[pos] <= '9') {
        value = value * 10 + static_cast<std::size_t>(regex[pos] - '0');
        ++pos;
        any = true;
    }
    if (pos < regex.size() && regex[pos] == ',') {
        throw UnsupportedConstructError("{m,n}");
    }
    if (!any || pos >= regex.size() || regex[pos] != '}') {
        throw ValidationError("malformed quantifier");
    }
    ++pos;  // consume '}'
    if (value == 0) {
        throw ValidationError("zero-length quantifier {0}");
    }
    return value;
}

void escape_into(std::string& out, const std::string& symbol) {
    std::uint32_t cp = 0;
    utf8_decode(symbol, 0, cp);
    if (needs_escape(cp)) {
        out.push_back('\\');
    }
    out += symbol;
}

}  // namespace

std::size_t SecretPattern::generated_char_length() const {
    std::size_t total = 0;
    for (const PatternSegment& seg : segments) {
        if (seg.kind == PatternSegment::Kind::Literal) {
            total += utf8_length(seg.literal);
        } else {
            total += seg.repeat;
        }
    }
    return total;
}

std::string SecretPattern::render_regex() const {
    std::string out;
    for (const PatternSegment& seg : segments) {
        if (seg.kind == PatternSegment::Kind::Literal) {
            for (const std::string& s : utf8_scalars(seg.literal)) {
                escape_into(out, s);
            }
        } else {
            out.push_back('[');
            for (const std::string& s : seg.charset) {
                escape_into(out, s);
            }
            out.push_back(']');
            if (seg.repeat != 1) {
                out += "{" + std::to_string(seg.repeat) + "}";
            }
        }
    }
    return out;
}

SecretPattern parse_pattern(std::string_view regex, std::string name) {
    if (regex.empty()) {
        throw ValidationError("empty pattern");
    }
    SecretPattern pattern;
    pattern.name = std::move(name);
    pattern.source_regex = std::string(regex);

    std::size_t pos = 0;
    const auto last_is_quantifiable_class = [&] {
        return !pattern.segments.empty() &&
               pattern.segments.back().kind == PatternSegment::Kind::Class;
    };
    bool last_class_quantified = false;

    const auto append_literal = [&](const std::string& s) {
        if (pattern.segments.empty() ||
            pattern.segments.back().kind != PatternSegment::Kind::Literal) {
            PatternSegment seg;
            seg.kind = PatternSegment::Kind::Literal;
            pattern.segments.push_back(std::move(seg));
        }
        pattern.segments.back().literal += s;
    };

    while (pos < regex.size()) {
        const char c = regex[pos];
        switch (c) {
            case '|': throw UnsupportedConstructError("| alternation");
            case '*': throw UnsupportedConstructError("* quantifier");
            case '+': throw UnsupportedConstructError("+ quantifier");
            case '?': throw UnsupportedConstructError("? quantifier");
            case '(': case ')': throw UnsupportedConstructError("group");
            case '^': case '$': throw UnsupportedConstructError("anchor");
            case '.': throw UnsupportedConstructError(". wildcard");
            case ']': throw ValidationError("unmatched ] in pattern");
            case '[': {
                PatternSegment seg;
                seg.kind = PatternSegment::Kind::Class;
                seg.charset = parse_class(regex, pos);
                seg.repeat = 1;
                pattern.segments.push_back(std::move(seg));
                last_class_quantified = false;
                break;
            }
            case '{': {
                const std::size_t n = parse_quantifier(regex, pos);
                if (last_is_quantifiable_class() && !last_class_quantified) {
                    pattern.segments.back().repeat = n;
                    last_class_quantified = true;
                } else if (!pattern.segments.empty() &&
                           pattern.segments.back().kind == PatternSegment::Kind::Literal &&
                           !pattern.segments.back().literal.empty()) {
                    // {n} after a literal repeats its last character.
                    std::string& lit = pattern.segments.back().literal;
                    const std::vector<std::string> scalars = utf8_scalars(lit);
                    const std::string last = scalars.back();
                    for (std::size_t i = 1; i < n; ++i) {
                        lit += last;
                    }
                } else {
                    throw ValidationError("quantifier with nothing to repeat");
                }
                break;
            }
            case '}': throw ValidationError("unmatched } in pattern");
            case '\\': {
                append_literal(parse_escape(regex, pos));
                last_class_quantified = false;
                break;
            }
            default: {
                std::uint32_t cp = 0;
                const std::size_t n = utf8_decode(regex, pos, cp);
                append_literal(std::string(regex.substr(pos, n)));
                pos += n;
                last_class_quantified = false;
                break;
            }
        }
    }
    return pattern;
}

std::vector<std::string> generate(const SecretPattern& pattern,
                                  std::size_t count,
                                  std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string s;
        for (const PatternSegment& seg : pattern.segments) {
            if (seg.kind == PatternSegment::Kind::Literal) {
                s += seg.literal;
            } else {
                for (std::size_t r = 0; r < seg.repeat; ++r) {
                    s += seg.charset[uniform_index(rng, seg.charset.size())];
                }
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

PatternMatcher::PatternMatcher(const SecretPattern& pattern) {
    for (const PatternSegment& seg : pattern.segments) {
        Step step;
        if (seg.kind == PatternSegment::Kind::Literal) {
            step.literal = true;
            step.text = seg.literal;
            step.repeat = 0;
        } else {
            step.literal = false;
            step.charset.insert(seg.charset.begin(), seg.charset.end());
            step.repeat = seg.repeat;
        }
        steps_.push_back(std::move(step));
    }
}

std::size_t PatternMatcher::match_at(std::string_view text, std::size_t pos) const {
    std::size_t cur = pos;
    for (const Step& step : steps_) {
        if (step.literal) {
            if (text.size() - cur < step.text.size() ||
                text.compare(cur, step.text.size(), step.text) != 0) {
                return 0;
            }
            cur += step.text.size();
        } else {
            for (std::size_t r = 0; r < step.repeat; ++r) {
                if (cur >= text.size()) {
                    return 0;
                }
                std::uint32_t cp = 0;
                const std::size_t n = utf8_decode(text, cur, cp);
                if (!step.charset.count(std::string(text.substr(cur, n)))) {
                    return 0;
                }
                cur += n;
            }
        }
    }
    return cur - pos;
}

const std::vector<SecretPattern>& bundled_patterns() {
    static const std::vector<SecretPattern> patterns = [] {
        std::vector<SecretPattern> p;
        p.push_back(parse_pattern("AKIA[0-9A-Z]{16}", "aws-access-key-id"));
        p.push_back(parse_pattern("AIza[0-9A-Za-z-_]{35}", "google-api-key"));
        p.push_back(parse_pattern("AKID[0-9a-zA-Z]{32}", "tencent-secret-id"));
        p.push_back(parse_pattern("ghp_[a-zA-Z0-9]{36}", "github-pat"));
        return p;
    }();
    return patterns;
}

std::vector<SecretPattern> load_pattern_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open pattern file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("pattern file is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) {
        throw ValidationError("pattern file must be a JSON list of {name, regex}");
    }
    std::vector<SecretPattern> patterns;
    for (const auto& entry : j) {
        patterns.push_back(
            parse_pattern(entry.at("regex").get<std::string>(), entry.at("name").get<std::string>()));
    }
    if (patterns.empty()) {
        throw ValidationError("pattern file contains no patterns");
    }
    return patterns;
}

std::string patterns_to_json(const std::vector<SecretPattern>& patterns) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const SecretPattern& p : patterns) {
        j.push_back({{"name", p.name}, {"regex", p.source_regex}});
    }
    return j.dump(2) + "\n";
}

}  // namespace tokaudit
