#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "ctxasr/corpus.hpp"

namespace ctxasr {

/// How much context a prompt carries. When only one side exists, the
/// corresponding half template is used; this is what handles conversation
/// boundaries.
enum class PromptVariant { NoContext, HistoryOnly, FutureOnly, Bidirectional };

const char* to_string(PromptVariant variant);

/// Four templates per language; placeholders "{history}" / "{future}" as
/// required by each variant.
struct LanguageTemplates {
    std::string no_context;
    std::string history_only;
    std::string future_only;
    std::string bidirectional;

    const std::string& for_variant(PromptVariant variant) const;
};

class PromptCatalog {
public:
    /// Throws unless every language has all four variants with the right
    /// placeholders.
    explicit PromptCatalog(std::map<Lang, LanguageTemplates> templates);

    const LanguageTemplates& templates_for(Lang lang) const;

private:
    std::map<Lang, LanguageTemplates> templates_;
};

/// Built-in defaults for all eleven languages. Only the English wording is
/// fixed by the upstream experiments; the other languages carry the same
/// meaning and are meant to be overridden via a catalog file when exact
/// wording matters.
const PromptCatalog& builtin_catalog();

/// Pure function of context presence: both -> Bidirectional, one side ->
/// the matching half variant, none -> NoContext.
PromptVariant select_variant(const ContextWindow& window);

/// Render the prompt for a window. Context strings are trimmed of leading
/// and trailing whitespace, then substituted verbatim. An optional cap
/// truncates each context to its last/first max_context_graphemes units
/// (history keeps its tail, future its head); 0 disables the cap.
std::string render(const PromptCatalog& catalog, const LanguageCode& language,
                   const ContextWindow& window, std::size_t max_context_graphemes = 0);

/// Load catalog overrides from a JSON file mapping language code to
/// {"no_context", "history_only", "future_only", "bidirectional"}.
/// Missing languages and missing variants fall back to the built-ins; an
/// empty file yields the full default catalog.
PromptCatalog load_catalog(const std::string& path);

} // namespace ctxasr
