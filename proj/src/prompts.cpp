#include "ctxasr/prompts.hpp"

#include <fstream>

#include "json.hpp"

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"
#include "ctxasr/unicode.hpp"

namespace ctxasr {

namespace {

constexpr std::string_view kHistoryPlaceholder = "{history}";
constexpr std::string_view kFuturePlaceholder = "{future}";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

void check_placeholders(Lang lang, PromptVariant variant, std::string_view tmpl,
                        std::size_t want_history, std::size_t want_future) {
    if (count_occurrences(tmpl, kHistoryPlaceholder) != want_history ||
        count_occurrences(tmpl, kFuturePlaceholder) != want_future) {
        throw DataError(std::string("catalog template ") + to_string(lang) + "/" +
                        to_string(variant) + " has wrong placeholders");
    }
}

std::string substitute(std::string tmpl, std::string_view placeholder, std::string_view value) {
    const auto pos = tmpl.find(placeholder);
    if (pos != std::string::npos) tmpl.replace(pos, placeholder.size(), value);
    return tmpl;
}

std::string cap_context(std::string_view text, std::size_t max_units, bool keep_tail) {
    if (max_units == 0) return std::string(text);
    auto units = graphemes(text);
    if (units.size() <= max_units) return std::string(text);
    std::string out;
    const std::size_t start = keep_tail ? units.size() - max_units : 0;
    for (std::size_t i = start; i < start + max_units; ++i) out.append(units[i]);
    return out;
}

std::map<Lang, LanguageTemplates> default_templates() {
    std::map<Lang, LanguageTemplates> t;
    t[Lang::en] = {
        "Transcribe speech to text.",
        "The previous context is: {history} Transcribe speech to text.",
        "The future context is: {future} Transcribe speech to text.",
        "The previous context is: {history} The future context is: {future} "
        "Transcribe speech to text.",
    };
    t[Lang::fr] = {
        "Transcrivez la parole en texte.",
        "Le contexte précédent est : {history} Transcrivez la parole en texte.",
        "Le contexte suivant est : {future} Transcrivez la parole en texte.",
        "Le contexte précédent est : {history} Le contexte suivant est : {future} "
        "Transcrivez la parole en texte.",
    };
    t[Lang::de] = {
        "Transkribiere Sprache in Text.",
        "Der vorherige Kontext ist: {history} Transkribiere Sprache in Text.",
        "Der nachfolgende Kontext ist: {future} Transkribiere Sprache in Text.",
        "Der vorherige Kontext ist: {history} Der nachfolgende Kontext ist: {future} "
        "Transkribiere Sprache in Text.",
    };
    t[Lang::it] = {
        "Trascrivi il parlato in testo.",
        "Il contesto precedente è: {history} Trascrivi il parlato in testo.",
        "Il contesto successivo è: {future} Trascrivi il parlato in testo.",
        "Il contesto precedente è: {history} Il contesto successivo è: {future} "
        "Trascrivi il parlato in testo.",
    };
    t[Lang::ja] = {
        "音声をテキストに書き起こしてください。",
        "前の文脈は: {history} 音声をテキストに書き起こしてください。",
        "後の文脈は: {future} 音声をテキストに書き起こしてください。",
        "前の文脈は: {history} 後の文脈は: {future} 音声をテキストに書き起こしてください。",
    };
    t[Lang::ko] = {
        "음성을 텍스트로 전사하세요.",
        "이전 문맥은: {history} 음성을 텍스트로 전사하세요.",
        "다음 문맥은: {future} 음성을 텍스트로 전사하세요.",
        "이전 문맥은: {history} 다음 문맥은: {future} 음성을 텍스트로 전사하세요.",
    };
    t[Lang::pt] = {
        "Transcreva a fala em texto.",
        "O contexto anterior é: {history} Transcreva a fala em texto.",
        "O contexto seguinte é: {future} Transcreva a fala em texto.",
        "O contexto anterior é: {history} O contexto seguinte é: {future} "
        "Transcreva a fala em texto.",
    };
    t[Lang::ru] = {
        "Преобразуйте речь в текст.",
        "Предыдущий контекст: {history} Преобразуйте речь в текст.",
        "Следующий контекст: {future} Преобразуйте речь в текст.",
        "Предыдущий контекст: {history} Следующий контекст: {future} "
        "Преобразуйте речь в текст.",
    };
    t[Lang::es] = {
        "Transcribe el habla a texto.",
        "El contexto anterior es: {history} Transcribe el habla a texto.",
        "El contexto siguiente es: {future} Transcribe el habla a texto.",
        "El contexto anterior es: {history} El contexto siguiente es: {future} "
        "Transcribe el habla a texto.",
    };
    t[Lang::th] = {
        "ถอดเสียงพูดเป็นข้อความ",
        "บริบทก่อนหน้าคือ: {history} ถอดเสียงพูดเป็นข้อความ",
        "บริบทถัดไปคือ: {future} ถอดเสียงพูดเป็นข้อความ",
        "บริบทก่อนหน้าคือ: {history} บริบทถัดไปคือ: {future} ถอดเสียงพูดเป็นข้อความ",
    };
    t[Lang::vi] = {
        "Chuyển lời nói thành văn bản.",
        "Ngữ cảnh trước là: {history} Chuyển lời nói thành văn bản.",
        "Ngữ cảnh sau là: {future} Chuyển lời nói thành văn bản.",
        "Ngữ cảnh trước là: {history} Ngữ cảnh sau là: {future} "
        "Chuyển lời nói thành văn bản.",
    };
    return t;
}

} // namespace

const char* to_string(PromptVariant variant) {
    switch (variant) {
        case PromptVariant::NoContext: return "no_context";
        case PromptVariant::HistoryOnly: return "history_only";
        case PromptVariant::FutureOnly: return "future_only";
        case PromptVariant::Bidirectional: return "bidirectional";
    }
    return "??";
}

const std::string& LanguageTemplates::for_variant(PromptVariant variant) const {
    switch (variant) {
        case PromptVariant::NoContext: return no_context;
        case PromptVariant::HistoryOnly: return history_only;
        case PromptVariant::FutureOnly: return future_only;
        case PromptVariant::Bidirectional: return bidirectional;
    }
    return no_context;
}

PromptCatalog::PromptCatalog(std::map<Lang, LanguageTemplates> templates)
    : templates_(std::move(templates)) {
    for (Lang lang : all_langs()) {
        auto it = templates_.find(lang);
        if (it == templates_.end()) {
            throw DataError(std::string("catalog is missing language ") + to_string(lang));
        }
        const auto& t = it->second;
        check_placeholders(lang, PromptVariant::NoContext, t.no_context, 0, 0);
        check_placeholders(lang, PromptVariant::HistoryOnly, t.history_only, 1, 0);
        check_placeholders(lang, PromptVariant::FutureOnly, t.future_only, 0, 1);
        check_placeholders(lang, PromptVariant::Bidirectional, t.bidirectional, 1, 1);
    }
}

const LanguageTemplates& PromptCatalog::templates_for(Lang lang) const {
    auto it = templates_.find(lang);
    if (it == templates_.end()) {
        throw DataError(std::string("catalog has no templates for ") + to_string(lang));
    }
    return it->second;
}

const PromptCatalog& builtin_catalog() {
    static const PromptCatalog catalog{default_templates()};
    return catalog;
}

PromptVariant select_variant(const ContextWindow& window) {
    if (window.history && window.future) return PromptVariant::Bidirectional;
    if (window.history) return PromptVariant::HistoryOnly;
    if (window.future) return PromptVariant::FutureOnly;
    return PromptVariant::NoContext;
}

std::string render(const PromptCatalog& catalog, const LanguageCode& language,
                   const ContextWindow& window, std::size_t max_context_graphemes) {
    const PromptVariant variant = select_variant(window);
    std::string prompt = catalog.templates_for(language.code).for_variant(variant);
    if (window.history) {
        std::string h = cap_context(trim(*window.history), max_context_graphemes, true);
        prompt = substitute(std::move(prompt), kHistoryPlaceholder, h);
    }
    if (window.future) {
        std::string f = cap_context(trim(*window.future), max_context_graphemes, false);
        prompt = substitute(std::move(prompt), kFuturePlaceholder, f);
    }
    return prompt;
}

PromptCatalog load_catalog(const std::string& path) {
    std::string body = read_file(path);
    // Blank files mean "use the defaults".
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return builtin_catalog();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("catalog " + path + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw DataError("catalog " + path + ": expected a JSON object");

    std::map<Lang, LanguageTemplates> merged = default_templates();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        auto lang = parse_lang(it.key());
        if (!lang) throw DataError("catalog " + path + ": unknown language \"" + it.key() + "\"");
        const auto& entry = it.value();
        if (!entry.is_object()) {
            throw DataError("catalog " + path + ": entry for \"" + it.key() +
                            "\" must be an object");
        }
        LanguageTemplates& t = merged[*lang];
        for (auto vit = entry.begin(); vit != entry.end(); ++vit) {
            if (!vit.value().is_string()) {
                throw DataError("catalog " + path + ": template " + it.key() + "/" + vit.key() +
                                " must be a string");
            }
            const std::string value = vit.value().get<std::string>();
            if (vit.key() == "no_context") t.no_context = value;
            else if (vit.key() == "history_only") t.history_only = value;
            else if (vit.key() == "future_only") t.future_only = value;
            else if (vit.key() == "bidirectional") t.bidirectional = value;
            else throw DataError("catalog " + path + ": unknown variant \"" + vit.key() + "\"");
        }
    }
    return PromptCatalog(std::move(merged)); // revalidates placeholders
}

} // namespace ctxasr
