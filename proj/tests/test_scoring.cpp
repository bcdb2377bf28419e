#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "ctxasr/errors.hpp"
#include "ctxasr/rng.hpp"
#include "ctxasr/scoring.hpp"

using namespace ctxasr;

namespace {

Segment ref_segment(const std::string& id, Lang lang, const std::string& text,
                    std::optional<std::string> accent = std::nullopt) {
    Segment s;
    s.id = id;
    s.conversation_id = "c_" + id;
    s.turn_index = 0;
    s.language.code = lang;
    s.language.accent = std::move(accent);
    s.audio_ref = id + ".wav";
    s.reference_text = text;
    return s;
}

std::vector<std::string> chars_of(const std::string& text) {
    std::vector<std::string> out;
    for (char c : text) out.emplace_back(1, c);
    return out;
}

// Exhaustive recursion, deliberately naive.
int oracle_distance(const std::vector<int>& a, std::size_t i, const std::vector<int>& b,
                    std::size_t j) {
    if (i == 0) return static_cast<int>(j);
    if (j == 0) return static_cast<int>(i);
    const int sub = oracle_distance(a, i - 1, b, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    const int del = oracle_distance(a, i - 1, b, j) + 1;
    const int ins = oracle_distance(a, i, b, j - 1) + 1;
    return std::min({sub, del, ins});
}

} // namespace

TEST_CASE("metric conventions: CER for ja/ko/th, WER otherwise") {
    CHECK(metric_for(Lang::ja) == MetricKind::CER);
    CHECK(metric_for(Lang::ko) == MetricKind::CER);
    CHECK(metric_for(Lang::th) == MetricKind::CER);
    for (Lang lang : {Lang::en, Lang::fr, Lang::de, Lang::it, Lang::pt, Lang::ru, Lang::es,
                      Lang::vi}) {
        CHECK(metric_for(lang) == MetricKind::WER);
    }
}

TEST_CASE("normalize lowercases, strips punctuation, and collapses spaces") {
    const LanguageCode en{Lang::en, std::nullopt};
    CHECK(normalize("Hello,  WORLD!", en) == "hello world");
    CHECK(normalize("", en) == "");
    CHECK(normalize("こんにちは。", {Lang::ja, std::nullopt}) ==
          "こんにちは");
    // NFC folds decomposed accents before comparison
    CHECK(normalize("café", {Lang::fr, std::nullopt}) == "café");
    CHECK(normalize("  Ein  Satz.  ", {Lang::de, std::nullopt}) == "ein satz");
}

TEST_CASE("tokenize_for_metric") {
    CHECK(tokenize_for_metric("a b c", MetricKind::WER) ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize_for_metric("ab c", MetricKind::CER) ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize_for_metric("", MetricKind::CER).empty());
    CHECK(tokenize_for_metric("", MetricKind::WER).empty());
    // CER counts grapheme clusters, not codepoints
    CHECK(tokenize_for_metric("éa", MetricKind::CER).size() == 2);
}

TEST_CASE("edit_distance worked examples") {
    CHECK(edit_distance({"a", "b", "c"}, {"a", "b", "c"}) == EditCounts{0, 0, 0});
    CHECK(edit_distance({"a", "b", "c"}, {"a", "x", "c"}) == EditCounts{1, 0, 0});
    CHECK(edit_distance({}, {}) == EditCounts{0, 0, 0});
    CHECK(edit_distance({"a", "b"}, {}) == EditCounts{0, 2, 0});
    CHECK(edit_distance({}, {"a", "b"}) == EditCounts{0, 0, 2});

    const auto kitten = edit_distance(chars_of("kitten"), chars_of("sitting"));
    CHECK(kitten.total() == 3);
    CHECK(kitten == EditCounts{2, 0, 1});
}

TEST_CASE("edit_distance prefers substitutions over insert+delete pairs") {
    // "ab" -> "ba" can be 2 substitutions or delete+insert; tie-break says 2 subs.
    CHECK(edit_distance({"a", "b"}, {"b", "a"}) == EditCounts{2, 0, 0});
}

TEST_CASE("edit_distance matches exhaustive recursion on short sequences") {
    // all pairs of sequences up to length 4 over a 2-symbol alphabet
    std::vector<std::vector<int>> seqs;
    for (int len = 0; len <= 4; ++len) {
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::vector<int> s;
            for (int p = 0; p < len; ++p) s.push_back((bits >> p) & 1);
            seqs.push_back(std::move(s));
        }
    }
    auto to_tokens = [](const std::vector<int>& s) {
        std::vector<std::string> t;
        for (int v : s) t.emplace_back(1, static_cast<char>('a' + v));
        return t;
    };
    for (const auto& a : seqs) {
        for (const auto& b : seqs) {
            const int want = oracle_distance(a, a.size(), b, b.size());
            CHECK(edit_distance(to_tokens(a), to_tokens(b)).total() == want);
        }
    }
}

TEST_CASE("score single segment: WER 1/3") {
    auto segments = std::vector<Segment>{ref_segment("s1", Lang::en, "a b c")};
    auto report = score(segments, {{"s1", "a x c"}});
    REQUIRE(report.groups.size() == 1);
    CHECK(report.groups[0].name == "en");
    CHECK(report.groups[0].metric == MetricKind::WER);
    CHECK(report.groups[0].rate() == doctest::Approx(1.0 / 3.0));
    CHECK(report.mer() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("pooled MER of the two-group worked example is 5/30") {
    // en: 10 reference words, 2 errors; ja: 20 reference characters, 3 errors.
    auto segments = std::vector<Segment>{
        ref_segment("e1", Lang::en, "w1 w2 w3 w4 w5 w6 w7 w8 w9 w10"),
        ref_segment("j1", Lang::ja, "あいうえおかきくけこさしすせそたちつてと"),
    };
    std::unordered_map<std::string, std::string> hyps = {
        {"e1", "w1 XX w3 w4 YY w6 w7 w8 w9 w10"},
        {"j1", "あいうえおかきくけこさしすせそたちXYZ"},
    };
    auto report = score(segments, hyps);
    CHECK(report.total_errors.total() == 5);
    CHECK(report.total_ref_tokens == 30);
    CHECK(std::abs(report.mer() - 5.0 / 30.0) < 1e-12);

    // MER sits between the group rates (weighted-mean property)
    double lo = 1e9, hi = -1e9;
    for (const auto& g : report.groups) {
        lo = std::min(lo, g.rate());
        hi = std::max(hi, g.rate());
    }
    CHECK(report.mer() >= lo);
    CHECK(report.mer() <= hi);
}

TEST_CASE("identical hypotheses score zero everywhere") {
    std::vector<Segment> segments;
    std::unordered_map<std::string, std::string> hyps;
    int i = 0;
    for (Lang lang : all_langs()) {
        auto id = "s" + std::to_string(i++);
        segments.push_back(ref_segment(id, lang, "wort eins zwei"));
        hyps[id] = "wort eins zwei";
    }
    auto report = score(segments, hyps);
    CHECK(report.mer() == 0.0);
    for (const auto& g : report.groups) CHECK(g.rate() == 0.0);
}

TEST_CASE("accent splitting follows the option") {
    auto segments = std::vector<Segment>{
        ref_segment("a", Lang::en, "one two", "American"),
        ref_segment("b", Lang::en, "three four", "Indian"),
        ref_segment("c", Lang::fr, "cinq six"),
    };
    std::unordered_map<std::string, std::string> hyps = {
        {"a", "one two"}, {"b", "three four"}, {"c", "cinq six"}};

    auto split = score(segments, hyps);
    REQUIRE(split.groups.size() == 3);
    CHECK(split.groups[0].name == "en-American");
    CHECK(split.groups[1].name == "en-Indian");
    CHECK(split.groups[2].name == "fr");

    ScoreOptions merged;
    merged.split_accents = false;
    auto plain = score(segments, hyps, merged);
    REQUIRE(plain.groups.size() == 2);
    CHECK(plain.groups[0].name == "en");
}

TEST_CASE("score rejects mismatched ids and missing references") {
    auto segments = std::vector<Segment>{ref_segment("s1", Lang::en, "a")};
    SUBCASE("missing hypothesis") {
        CHECK_THROWS_WITH_AS(score(segments, {}), doctest::Contains("s1"), DataError);
    }
    SUBCASE("unknown hypothesis id") {
        CHECK_THROWS_WITH_AS(score(segments, {{"s1", "a"}, {"zz", "b"}}),
                             doctest::Contains("zz"), DataError);
    }
    SUBCASE("missing reference") {
        auto no_ref = segments;
        no_ref[0].reference_text.reset();
        CHECK_THROWS_WITH_AS(score(no_ref, {{"s1", "a"}}),
                             doctest::Contains("without reference"), DataError);
    }
}

TEST_CASE("empty normalized references are excluded but reported") {
    auto segments = std::vector<Segment>{
        ref_segment("p", Lang::en, "..."), // only punctuation
        ref_segment("q", Lang::en, "hello world"),
    };
    auto report = score(segments, {{"p", "whatever"}, {"q", "hello world"}});
    REQUIRE(report.excluded_empty_refs.size() == 1);
    CHECK(report.excluded_empty_refs[0] == "p");
    CHECK(report.total_ref_tokens == 2);
    CHECK(report.mer() == 0.0);
}

TEST_CASE("raw mode skips normalization") {
    auto segments = std::vector<Segment>{ref_segment("s", Lang::en, "Hello")};
    ScoreOptions raw;
    raw.raw = true;
    CHECK(score(segments, {{"s", "hello"}}, raw).mer() == doctest::Approx(1.0));
    CHECK(score(segments, {{"s", "hello"}}).mer() == 0.0);
}

TEST_CASE("segment order does not change the report") {
    std::vector<Segment> segments = {
        ref_segment("a", Lang::en, "x y z"),
        ref_segment("b", Lang::ja, "あいう"),
        ref_segment("c", Lang::en, "p q", "British"),
    };
    std::unordered_map<std::string, std::string> hyps = {
        {"a", "x q z"}, {"b", "あえう"}, {"c", "p q"}};
    auto first = score(segments, hyps).to_json().dump();
    std::reverse(segments.begin(), segments.end());
    auto second = score(segments, hyps).to_json().dump();
    CHECK(first == second);
}

TEST_CASE("macro option adds a macro-average over groups") {
    auto segments = std::vector<Segment>{
        ref_segment("a", Lang::en, "one two three four"), // 1/4 with one error
        ref_segment("b", Lang::fr, "un deux"),            // 0/2
    };
    std::unordered_map<std::string, std::string> hyps = {{"a", "one two three X"},
                                                         {"b", "un deux"}};
    ScoreOptions opts;
    opts.macro = true;
    auto report = score(segments, hyps, opts);
    REQUIRE(report.macro_mer.has_value());
    CHECK(*report.macro_mer == doctest::Approx(0.125));
    CHECK(report.mer() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("report JSON has the documented shape") {
    auto segments = std::vector<Segment>{ref_segment("s1", Lang::ko, "가나다")};
    auto doc = score(segments, {{"s1", "가나라"}}).to_json();
    REQUIRE(doc.contains("groups"));
    REQUIRE(doc.contains("mer"));
    const auto& g = doc["groups"][0];
    CHECK(g["name"] == "ko");
    CHECK(g["metric"] == "CER");
    CHECK(g["errors"]["sub"] == 1);
    CHECK(g["errors"]["del"] == 0);
    CHECK(g["errors"]["ins"] == 0);
    CHECK(g["ref_tokens"] == 3);
}
