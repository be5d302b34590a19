#include <string>

#include "doctest.h"
#include "tokaudit/rng.hpp"
#include "tokaudit/text.hpp"

using namespace tokaudit;

TEST_CASE("utf8 scalar splitting") {
    const auto scalars = utf8_scalars("h\xc3\xa9y");
    REQUIRE(scalars.size() == 3);
    CHECK(scalars[0] == "h");
    CHECK(scalars[1] == "\xc3\xa9");
    CHECK(scalars[2] == "y");
    CHECK(utf8_length("") == 0);
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length("\xe4\xb8\xad\xe6\x96\x87") == 2);
    // malformed bytes come through one at a time
    CHECK(utf8_length("\xff\xfe") == 2);
}

TEST_CASE("utf8 encode round trip") {
    for (const std::uint32_t cp : {0x41u, 0xe9u, 0x4e2du, 0x1f600u}) {
        const std::string s = utf8_encode(cp);
        std::uint32_t back = 0;
        CHECK(utf8_decode(s, 0, back) == s.size());
        CHECK(back == cp);
    }
}

TEST_CASE("whitespace pre-tokenization keeps one leading space") {
    const PreTokenRules rules;
    CHECK(pretokenize("low low lower", rules) ==
          std::vector<std::string>{"low", " low", " lower"});
    CHECK(pretokenize("a  b", rules) == std::vector<std::string>{"a", " ", " b"});
    CHECK(pretokenize("x ", rules) == std::vector<std::string>{"x", " "});
    CHECK(pretokenize("\n\nx", rules) == std::vector<std::string>{"\n\n", "x"});
    CHECK(pretokenize("a \n b", rules) == std::vector<std::string>{"a", " \n", " b"});
    CHECK(pretokenize(" x", rules) == std::vector<std::string>{" x"});
    CHECK(pretokenize("", rules).empty());
}

TEST_CASE("pre-tokenization mode none is a single piece") {
    const PreTokenRules rules{PreTokenMode::None, false};
    CHECK(pretokenize("a b  c", rules) == std::vector<std::string>{"a b  c"});
}

TEST_CASE("pre-tokenization pieces concatenate to the input") {
    Rng rng(7);
    const std::string alphabet = "ab \t\n.z";
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const std::size_t len = uniform_index(rng, 40);
        for (std::size_t i = 0; i < len; ++i) {
            text += alphabet[uniform_index(rng, alphabet.size())];
        }
        for (const PreTokenMode mode : {PreTokenMode::WhitespaceKeepLeadingSpace,
                                        PreTokenMode::None}) {
            std::string joined;
            for (const std::string& piece : pretokenize(text, {mode, false})) {
                CHECK(!piece.empty());
                joined += piece;
            }
            CHECK(joined == text);
        }
    }
}

TEST_CASE("lowercase normalization") {
    CHECK(normalize_text("AbC", {PreTokenMode::None, true}) == "abc");
    CHECK(normalize_text("AbC", {PreTokenMode::None, false}) == "AbC");
}

TEST_CASE("pre-token mode names round trip") {
    CHECK(pretoken_mode_from_name(pretoken_mode_name(PreTokenMode::None)) == PreTokenMode::None);
    CHECK(pretoken_mode_from_name("whitespace-keep-leading-space") ==
          PreTokenMode::WhitespaceKeepLeadingSpace);
    CHECK_THROWS(pretoken_mode_from_name("bogus"));
}
