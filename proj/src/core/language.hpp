#pragma once

#include <optional>
#include <string_view>

namespace codepoison {

enum class Language { C, Java };

std::string_view to_string(Language lang) noexcept;
/// Accepts "c"/"C" and "java"/"Java".
std::optional<Language> parse_language(std::string_view name) noexcept;

}  // namespace codepoison
