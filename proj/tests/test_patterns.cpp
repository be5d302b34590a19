#include <regex>
#include <string>

#include "doctest.h"
#include "support/capture.hpp"
#include "tokaudit/error.hpp"
#include "tokaudit/patterns.hpp"

using namespace tokaudit;

TEST_CASE("table-1 style patterns parse") {
    const SecretPattern aws = parse_pattern("AKIA[0-9A-Z]{16}", "aws");
    REQUIRE(aws.segments.size() == 2);
    CHECK(aws.segments[0].kind == PatternSegment::Kind::Literal);
    CHECK(aws.segments[0].literal == "AKIA");
    CHECK(aws.segments[1].kind == PatternSegment::Kind::Class);
    CHECK(aws.segments[1].charset.size() == 36);
    CHECK(aws.segments[1].repeat == 16);
    CHECK(aws.generated_char_length() == 20);

    const SecretPattern literal = parse_pattern("abc", "lit");
    REQUIRE(literal.segments.size() == 1);
    CHECK(literal.segments[0].literal == "abc");

    // trailing dash in the class is a literal, not a range
    const SecretPattern google = parse_pattern("AIza[0-9A-Za-z-_]{35}", "google");
    CHECK(google.segments[1].charset.size() == 64);
    CHECK(google.generated_char_length() == 39);

    const SecretPattern ghp = parse_pattern("ghp_[a-zA-Z0-9]{36}", "ghp");
    CHECK(ghp.segments[1].charset.size() == 62);
    CHECK(ghp.generated_char_length() == 40);
}

TEST_CASE("unsupported constructs are named") {
    const auto construct_of = [](const char* regex) {
        try {
            parse_pattern(regex, "x");
        } catch (const UnsupportedConstructError& e) {
            return e.construct();
        }
        return std::string("no error");
    };
    CHECK(construct_of("a*") == "* quantifier");
    CHECK(construct_of("a+") == "+ quantifier");
    CHECK(construct_of("a?") == "? quantifier");
    CHECK(construct_of("a|b") == "| alternation");
    CHECK(construct_of("(ab)") == "group");
    CHECK(construct_of("^ab") == "anchor");
    CHECK(construct_of("a{2,3}") == "{m,n}");
    CHECK(construct_of("a.b") == ". wildcard");
    CHECK(construct_of("\\d{4}") == "\\d");
}

TEST_CASE("malformed patterns error") {
    CHECK_THROWS_AS(parse_pattern("", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("[ab", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("[]", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("[z-a]", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("{3}", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("a{0}", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("ab]", "x"), ValidationError);
    CHECK_THROWS_AS(parse_pattern("a\\", "x"), ValidationError);
}

TEST_CASE("quantified literals repeat the last character") {
    const SecretPattern p = parse_pattern("ab{3}", "x");
    REQUIRE(p.segments.size() == 1);
    CHECK(p.segments[0].literal == "abbb");
    const SecretPattern single = parse_pattern("[a]{5}", "x");
    CHECK(single.segments[0].charset == std::vector<std::string>{"a"});
    CHECK(single.segments[0].repeat == 5);
}

TEST_CASE("generation is deterministic and well-formed") {
    const SecretPattern aws = parse_pattern("AKIA[0-9A-Z]{16}", "aws");
    const auto batch = generate(aws, 1, 7);
    REQUIRE(batch.size() == 1);
    CHECK(batch[0].size() == 20);
    CHECK(batch[0].substr(0, 4) == "AKIA");
    for (const char c : batch[0].substr(4)) {
        CHECK(((c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z')));
    }

    CHECK(generate(parse_pattern("abc", "lit"), 1, 0) == std::vector<std::string>{"abc"});
    CHECK(generate(aws, 5, 7) == generate(aws, 5, 7));
    CHECK(generate(aws, 0, 7).empty());
    CHECK(generate(aws, 5, 7) != generate(aws, 5, 8));
}

TEST_CASE("generated strings match both source and rendered regex") {
    for (const SecretPattern& pattern : bundled_patterns()) {
        const std::regex source(pattern.source_regex);
        const std::regex rendered(pattern.render_regex());
        for (const std::string& secret : generate(pattern, 200, 31337)) {
            CHECK(std::regex_match(secret, source));
            CHECK(std::regex_match(secret, rendered));
        }
    }
}

TEST_CASE("matcher finds matches exactly") {
    const SecretPattern aws = parse_pattern("AKIA[0-9A-Z]{16}", "aws");
    const PatternMatcher matcher(aws);
    const std::string secret = generate(aws, 1, 3).front();
    const std::string text = "key = " + secret + ";";
    CHECK(matcher.match_at(text, 6) == 20);
    CHECK(matcher.match_at(text, 5) == 0);
    CHECK(matcher.match_at(text, 7) == 0);
    CHECK(matcher.match_at("AKIA", 0) == 0);  // too short
}

TEST_CASE("pattern files load and serialize") {
    testsupport::TempDir dir("patterns");
    const auto path = dir.path() / "patterns.json";
    testsupport::spit(path, patterns_to_json(bundled_patterns()));
    const auto loaded = load_pattern_file(path);
    REQUIRE(loaded.size() == bundled_patterns().size());
    CHECK(loaded[0].name == bundled_patterns()[0].name);
    CHECK(loaded[0].source_regex == bundled_patterns()[0].source_regex);

    testsupport::spit(path, "[]");
    CHECK_THROWS_AS(load_pattern_file(path), ValidationError);
    testsupport::spit(path, "{\"not\": \"a list\"}");
    CHECK_THROWS_AS(load_pattern_file(path), ValidationError);
    CHECK_THROWS_AS(load_pattern_file(dir.path() / "missing.json"), ValidationError);
}
