#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lipfuse {

/// Spoken language of a clip. The integer codes are part of the file formats
/// and of the confusion-matrix label order; do not renumber.
enum class Language : std::uint8_t {
  kFrench = 0,
  kJapanese = 1,
  kEnglish = 2,
  kItalian = 3,
  kDutch = 4,
  kRussian = 5,
  kSpanish = 6,
  kGerman = 7,
};

inline constexpr int kLanguageCount = 8;

inline constexpr std::array<Language, kLanguageCount> kAllLanguages = {
    Language::kFrench,  Language::kJapanese, Language::kEnglish,
    Language::kItalian, Language::kDutch,    Language::kRussian,
    Language::kSpanish, Language::kGerman,
};

constexpr int language_code(Language lang) { return static_cast<int>(lang); }

/// Throws InvalidArgument when code is outside [0, 7].
Language language_from_code(int code);

/// Lowercase English name ("french", "japanese", ...).
std::string_view language_name(Language lang);

std::optional<Language> parse_language(std::string_view name);

/// Like parse_language but throws DataError on unknown names.
Language language_from_name(std::string_view name);

}  // namespace lipfuse
