#pragma once

#include <string>
#include <string_view>

namespace cwsd::utf8 {

// Decodes UTF-8 into Unicode scalar values. Throws Error(kEncoding) on
// malformed input, overlong forms, surrogates, or values above U+10FFFF.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
std::string encode(char32_t c);

// Strips a trailing '\r' (CRLF input) and surrounding ASCII whitespace.
std::string_view trim(std::string_view line);

}  // namespace cwsd::utf8
