#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace tokaudit {

// One piece of a restricted secret regex: either a literal run or a character
// class repeated a fixed number of times.
struct PatternSegment {
    enum class Kind { Literal, Class };

    Kind kind = Kind::Literal;
    std::string literal;                // Kind::Literal
    std::vector<std::string> charset;   // Kind::Class, symbols in first-occurrence order
    std::size_t repeat = 1;             // Kind::Class
};

// A secret format: literal segments plus fixed-repeat character classes, so
// every generated string has the same character length.
struct SecretPattern {
    std::string name;
    std::string source_regex;
    std::vector<PatternSegment> segments;

    std::size_t generated_char_length() const;
    // Regex matching exactly the generated language (symbols listed explicitly).
    std::string render_regex() const;
};

// Accepts literal runs, character classes with ranges and single characters
// (including escaped - and _), and fixed {n} quantifiers. Everything else
// (alternation, *, +, ?, {m,n}, anchors, groups, wildcards) raises an
// UnsupportedConstructError naming the construct.
SecretPattern parse_pattern(std::string_view regex, std::string name);

// Deterministic generation: each class position is drawn uniformly and
// independently with a seeded generator, so (pattern, count, seed) fully
// determines the output.
std::vector<std::string> generate(const SecretPattern& pattern,
                                  std::size_t count,
                                  std::uint64_t seed);

// Matcher for scanning; walks the segments at one position.
class PatternMatcher {
public:
    explicit PatternMatcher(const SecretPattern& pattern);

    // Byte length of the match starting at `pos`, or 0 if there is none.
    std::size_t match_at(std::string_view text, std::size_t pos) const;

private:
    struct Step {
        bool literal;
        std::string text;
        std::unordered_set<std::string> charset;
        std::size_t repeat;
    };
    std::vector<Step> steps_;
};

// Table 1's three service patterns plus the GitHub personal access token.
const std::vector<SecretPattern>& bundled_patterns();

// Pattern file: JSON list of {"name": ..., "regex": ...}.
std::vector<SecretPattern> load_pattern_file(const std::filesystem::path& path);
std::string patterns_to_json(const std::vector<SecretPattern>& patterns);

}  // namespace tokaudit
