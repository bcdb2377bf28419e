#include "doctest.h"

#include <string>

#include "ctxasr/unicode.hpp"

using namespace ctxasr;

TEST_CASE("graphemes split ASCII one byte at a time") {
    CHECK(graphemes("").empty());
    auto g = graphemes("abc");
    REQUIRE(g.size() == 3);
    CHECK(g[0] == "a");
    CHECK(g[1] == "b");
    CHECK(g[2] == "c");
}

TEST_CASE("graphemes keep combining sequences together") {
    CHECK(grapheme_count("é") == 1);       // precomposed e-acute
    CHECK(grapheme_count("é") == 1);      // decomposed e-acute
    CHECK(grapheme_count("한") == 1);       // Hangul syllable
    CHECK(grapheme_count("한") == 1); // conjoining jamo
    CHECK(grapheme_count("áb́") == 2);
    CHECK(grapheme_count("\U0001F1EB\U0001F1F7") == 1); // regional-indicator pair
    // Thai: NO NU + MAI THO + SARA AM stays one user-perceived character
    CHECK(grapheme_count("น้ำ") == 1);
}

TEST_CASE("grapheme views concatenate back to the original bytes") {
    const std::string text = "á น้ำx한";
    std::string joined;
    for (auto g : graphemes(text)) joined.append(g);
    CHECK(joined == text);
}

TEST_CASE("nfc composes canonical sequences") {
    CHECK(nfc("é") == "é");
    CHECK(nfc("한") == "한");
    CHECK(nfc("ế") == "ế"); // Vietnamese e-circumflex-acute
    CHECK(nfc("plain") == "plain");
    CHECK(nfc("") == "");
}

TEST_CASE("to_lower handles cased scripts and leaves others alone") {
    CHECK(to_lower("HeLLo") == "hello");
    CHECK(to_lower("СТРАНА") == "страна");
    CHECK(to_lower("ÉCOLE") == "école");
    CHECK(to_lower("こん") == "こん");
}

TEST_CASE("strip_punctuation drops every P* codepoint") {
    CHECK(strip_punctuation("Hello, world!") == "Hello world");
    CHECK(strip_punctuation("こんにちは。") == "こんにちは");
    CHECK(strip_punctuation("«oui»") == "oui");
    CHECK(strip_punctuation("a-b_c") == "abc");
    CHECK(strip_punctuation("") == "");
}

TEST_CASE("whitespace helpers") {
    CHECK(collapse_whitespace("  a\t b\n") == "a b");
    CHECK(collapse_whitespace("a") == "a");
    CHECK(collapse_whitespace(" \t ") == "");
    CHECK(remove_whitespace("a b\tc") == "abc");
    CHECK(trim("  hi  ") == "hi");
    CHECK(trim("　hi　") == "hi"); // ideographic space
    CHECK(trim("") == "");

    auto words = split_whitespace(" a  bb\tc ");
    REQUIRE(words.size() == 3);
    CHECK(words[0] == "a");
    CHECK(words[1] == "bb");
    CHECK(words[2] == "c");
}
