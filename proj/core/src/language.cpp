#include "lipfuse/language.hpp"

#include "lipfuse/error.hpp"

namespace lipfuse {
namespace {

constexpr std::array<std::string_view, kLanguageCount> kNames = {
    "french", "japanese", "english", "italian",
    "dutch",  "russian",  "spanish", "german",
};

}  // namespace

Language language_from_code(int code) {
  if (code < 0 || code >= kLanguageCount) {
    throw InvalidArgument("language code out of range: " + std::to_string(code));
  }
  return static_cast<Language>(code);
}

std::string_view language_name(Language lang) {
  return kNames[static_cast<std::size_t>(language_code(lang))];
}

std::optional<Language> parse_language(std::string_view name) {
  for (int i = 0; i < kLanguageCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<Language>(i);
    }
  }
  return std::nullopt;
}

Language language_from_name(std::string_view name) {
  if (auto lang = parse_language(name)) {
    return *lang;
  }
  throw DataError("unknown language: '" + std::string(name) + "'");
}

}  // namespace lipfuse
