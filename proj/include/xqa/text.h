// UTF-8 helpers shared by answer normalization, tokenization and the wire
// protocol's code-point offsets.

#ifndef XQA_TEXT_H_
#define XQA_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace xqa::text {

// Decodes one code point at byte offset `pos` and advances `pos`. Malformed
// bytes decode as themselves (Latin-1 fallback) and advance by one.
char32_t decode(std::string_view s, std::size_t &pos);

void append_utf8(std::string &out, char32_t cp);

// Python's str.isspace() for the code points it accepts.
bool is_space(char32_t cp);

// Word characters in the sense of a Unicode regex \w: letters, digits and
// underscore. Non-ASCII punctuation and symbol blocks are treated as
// non-word.
bool is_word(char32_t cp);

bool is_ascii_punct(char32_t cp);

// Lowercases ASCII plus the Latin-1, Latin Extended-A, Greek and Cyrillic
// uppercase letters; other code points are returned unchanged.
char32_t to_lower(char32_t cp);

std::size_t codepoint_count(std::string_view s);

// Byte offset of the code point with index `cp_index`; npos if out of range.
// `cp_index == codepoint_count(s)` maps to s.size().
std::size_t byte_offset(std::string_view s, std::size_t cp_index);

// Code-point index of a byte offset that lies on a code-point boundary; npos
// otherwise.
std::size_t codepoint_offset(std::string_view s, std::size_t byte_index);

// Splits on whitespace (is_space), dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace xqa::text

#endif  // XQA_TEXT_H_
