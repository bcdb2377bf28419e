#include "doctest.h"

#include <set>
#include <string>

#include "ctxasr/errors.hpp"
#include "ctxasr/prompts.hpp"
#include "support/temp_dir.hpp"

using namespace ctxasr;
using ctxasr::test::TempDir;

TEST_CASE("select_variant is a pure function of presence") {
    CHECK(select_variant({std::nullopt, std::nullopt}) == PromptVariant::NoContext);
    CHECK(select_variant({"h", std::nullopt}) == PromptVariant::HistoryOnly);
    CHECK(select_variant({std::nullopt, "f"}) == PromptVariant::FutureOnly);
    CHECK(select_variant({"h", "f"}) == PromptVariant::Bidirectional);
    // empty string is present, not absent
    CHECK(select_variant({std::string(""), std::nullopt}) == PromptVariant::HistoryOnly);
    CHECK(select_variant({std::nullopt, std::string("")}) == PromptVariant::FutureOnly);
}

TEST_CASE("English prompts match the shipped wording") {
    const auto& catalog = builtin_catalog();
    const LanguageCode en{Lang::en, std::nullopt};

    CHECK(render(catalog, en, {}) == "Transcribe speech to text.");
    CHECK(render(catalog, en, {"Hello there.", std::nullopt}) ==
          "The previous context is: Hello there. Transcribe speech to text.");
    CHECK(render(catalog, en, {std::nullopt, "See you."}) ==
          "The future context is: See you. Transcribe speech to text.");
    CHECK(render(catalog, en, {"A.", "B."}) ==
          "The previous context is: A. The future context is: B. Transcribe speech to text.");
}

TEST_CASE("render trims context edges but keeps inner text verbatim") {
    const auto& catalog = builtin_catalog();
    const LanguageCode en{Lang::en, std::nullopt};
    CHECK(render(catalog, en, {"  Hello there. ", std::nullopt}) ==
          "The previous context is: Hello there. Transcribe speech to text.");
    CHECK(render(catalog, en, {"a  b", std::nullopt}) ==
          "The previous context is: a  b Transcribe speech to text.");
}

TEST_CASE("accents do not change the prompt") {
    const auto& catalog = builtin_catalog();
    CHECK(render(catalog, {Lang::en, "Indian"}, {}) == render(catalog, {Lang::en, std::nullopt}, {}));
}

TEST_CASE("context strings appear in the prompt exactly when present") {
    const auto& catalog = builtin_catalog();
    const std::string h = "HISTORYMARKER";
    const std::string f = "FUTUREMARKER";
    for (Lang lang : all_langs()) {
        const LanguageCode lc{lang, std::nullopt};
        for (int mask = 0; mask < 4; ++mask) {
            ContextWindow w;
            if (mask & 1) w.history = h;
            if (mask & 2) w.future = f;
            const std::string prompt = render(catalog, lc, w);
            CHECK((prompt.find(h) != std::string::npos) == bool(mask & 1));
            CHECK((prompt.find(f) != std::string::npos) == bool(mask & 2));
        }
    }
}

TEST_CASE("no-context templates are language specific and used verbatim") {
    const auto& catalog = builtin_catalog();
    std::set<std::string> seen;
    for (Lang lang : all_langs()) {
        const std::string prompt = render(catalog, {lang, std::nullopt}, {});
        CHECK(prompt == catalog.templates_for(lang).no_context);
        seen.insert(prompt);
    }
    CHECK(seen.size() == kLangCount);
}

TEST_CASE("optional context cap keeps history tail and future head") {
    const auto& catalog = builtin_catalog();
    const LanguageCode en{Lang::en, std::nullopt};
    CHECK(render(catalog, en, {"abcdefgh", std::nullopt}, 3) ==
          "The previous context is: fgh Transcribe speech to text.");
    CHECK(render(catalog, en, {std::nullopt, "abcdefgh"}, 3) ==
          "The future context is: abc Transcribe speech to text.");
}

TEST_CASE("load_catalog falls back to the defaults") {
    TempDir dir;
    SUBCASE("blank file yields the full default catalog") {
        auto catalog = load_catalog(dir.file("blank.json", "\n"));
        for (Lang lang : all_langs()) {
            CHECK(catalog.templates_for(lang).no_context ==
                  builtin_catalog().templates_for(lang).no_context);
        }
    }
    SUBCASE("partial override keeps defaults elsewhere") {
        auto catalog = load_catalog(dir.file(
            "fr.json", R"({"fr": {"bidirectional": "Avant: {history} Après: {future} Allez."}})"));
        CHECK(catalog.templates_for(Lang::fr).bidirectional ==
              "Avant: {history} Après: {future} Allez.");
        CHECK(catalog.templates_for(Lang::fr).no_context ==
              builtin_catalog().templates_for(Lang::fr).no_context);
        CHECK(catalog.templates_for(Lang::de).bidirectional ==
              builtin_catalog().templates_for(Lang::de).bidirectional);
    }
}

TEST_CASE("load_catalog validation") {
    TempDir dir;
    SUBCASE("history_only must contain its placeholder") {
        auto path = dir.file("bad.json", R"({"en": {"history_only": "no placeholder here"}})");
        CHECK_THROWS_WITH_AS(load_catalog(path), doctest::Contains("placeholders"), DataError);
    }
    SUBCASE("stray placeholder in no_context is rejected") {
        auto path = dir.file("bad2.json", R"({"en": {"no_context": "oops {history}"}})");
        CHECK_THROWS_AS(load_catalog(path), DataError);
    }
    SUBCASE("unknown language key") {
        auto path = dir.file("bad3.json", R"({"zz": {"no_context": "hi"}})");
        CHECK_THROWS_WITH_AS(load_catalog(path), doctest::Contains("unknown language"), DataError);
    }
    SUBCASE("unknown variant key") {
        auto path = dir.file("bad4.json", R"({"en": {"sideways": "hi"}})");
        CHECK_THROWS_WITH_AS(load_catalog(path), doctest::Contains("unknown variant"), DataError);
    }
    SUBCASE("malformed JSON") {
        auto path = dir.file("bad5.json", "{nope");
        CHECK_THROWS_WITH_AS(load_catalog(path), doctest::Contains("malformed"), DataError);
    }
}

TEST_CASE("the shipped catalog file matches the built-ins") {
    auto catalog = load_catalog(std::string(CTXASR_SOURCE_DIR) + "/configs/prompt_catalog.json");
    for (Lang lang : all_langs()) {
        const auto& a = catalog.templates_for(lang);
        const auto& b = builtin_catalog().templates_for(lang);
        CHECK(a.no_context == b.no_context);
        CHECK(a.history_only == b.history_only);
        CHECK(a.future_only == b.future_only);
        CHECK(a.bidirectional == b.bidirectional);
    }
}
