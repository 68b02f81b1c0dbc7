#pragma once

// Segmented-corpus and raw-text file formats: UTF-8, one sentence per line,
// words separated by ASCII spaces. CRLF is accepted on input; output uses LF.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwsd/tagcodec.hpp"

namespace cwsd {

Sentence parse_segmented_line(std::string_view line);

// One entry per input line, blank lines kept as empty sentences.
std::vector<Sentence> read_segmented_lines(const std::filesystem::path& path);

// Same as read_segmented_lines with blank lines dropped.
std::vector<Sentence> read_segmented_corpus(const std::filesystem::path& path);

std::vector<std::u32string> read_raw_lines(const std::filesystem::path& path);

std::string format_segmented(const Sentence& words);

void write_segmented(std::ostream& out, const std::vector<Sentence>& corpus);

std::vector<LabeledSentence> to_labeled(const std::vector<Sentence>& corpus);

}  // namespace cwsd
