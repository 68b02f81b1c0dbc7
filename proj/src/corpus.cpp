#include "cwsd/corpus.hpp"

#include <fstream>
#include <ostream>

#include "cwsd/error.hpp"
#include "cwsd/utf8.hpp"

namespace cwsd {

namespace {

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      fn(line);
    } catch (const Error& e) {
      fail(e.kind(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) fail(ErrorKind::kIo, "read error on " + path.string());
}

}  // namespace

Sentence parse_segmented_line(std::string_view line) {
  Sentence words;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(utf8::decode(line.substr(i, j - i)));
    i = j;
  }
  return words;
}

std::vector<Sentence> read_segmented_lines(const std::filesystem::path& path) {
  std::vector<Sentence> corpus;
  for_each_line(path, [&](const std::string& line) {
    corpus.push_back(parse_segmented_line(line));
  });
  return corpus;
}

std::vector<Sentence> read_segmented_corpus(const std::filesystem::path& path) {
  std::vector<Sentence> corpus;
  for_each_line(path, [&](const std::string& line) {
    auto words = parse_segmented_line(line);
    if (!words.empty()) corpus.push_back(std::move(words));
  });
  return corpus;
}

std::vector<std::u32string> read_raw_lines(const std::filesystem::path& path) {
  std::vector<std::u32string> lines;
  for_each_line(path, [&](const std::string& line) {
    lines.push_back(utf8::decode(line));
  });
  return lines;
}

std::string format_segmented(const Sentence& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += utf8::encode(words[i]);
  }
  return out;
}

void write_segmented(std::ostream& out, const std::vector<Sentence>& corpus) {
  for (const auto& s : corpus) out << format_segmented(s) << '\n';
}

std::vector<LabeledSentence> to_labeled(const std::vector<Sentence>& corpus) {
  std::vector<LabeledSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(label_sentence(s));
  return out;
}

}  // namespace cwsd
