#include "cwsd/model_io.hpp"

#include <bit>
#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "cwsd/utf8.hpp"

namespace cwsd {

namespace {

constexpr std::string_view kMagic = "CWSD1";

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

[[noreturn]] void format_error(size_t offset, const std::string& what) {
  fail(ErrorKind::kFormat, "model file offset " + std::to_string(offset) + ": " + what);
}

class LineReader {
 public:
  explicit LineReader(const std::string& bytes) : bytes_(bytes) {}

  std::string_view next(const char* what) {
    const size_t nl = bytes_.find('\n', pos_);
    if (nl == std::string::npos) format_error(pos_, std::string("truncated header, expected ") + what);
    line_start_ = pos_;
    std::string_view line(bytes_.data() + pos_, nl - pos_);
    pos_ = nl + 1;
    return line;
  }

  size_t line_start() const { return line_start_; }
  size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
  size_t line_start_ = 0;
};

long parse_count(std::string_view text, size_t offset) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 0) {
    format_error(offset, "malformed number '" + std::string(text) + "'");
  }
  return v;
}

long keyed_count(LineReader& in, std::string_view key) {
  const auto line = in.next(std::string(key).c_str());
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    format_error(in.line_start(), "expected '" + std::string(key) + " <n>'");
  }
  return parse_count(line.substr(key.size() + 1), in.line_start());
}

}  // namespace

std::string serialize_model(const Model& model) {
  const auto& p = model.params;
  if (p.vocab_size() != model.vocab.size()) {
    fail(ErrorKind::kInvalidState, "model vocab size does not match embedding rows");
  }
  std::ostringstream header;
  header << kMagic << '\n'
         << "vocab " << p.vocab_size() << '\n'
         << "dim " << p.embedding_dim() << '\n'
         << "kernels";
  for (const auto& bank : p.conv) header << ' ' << bank.width << ':' << bank.weights.rows();
  header << '\n'
         << "tags " << p.num_tags() << '\n'
         << "mask " << (model.mask ? 1 : 0) << '\n';
  for (char32_t c : model.vocab.chars()) {
    if (c == U'\n') fail(ErrorKind::kInvalidState, "vocabulary contains a newline character");
    header << utf8::encode(c) << '\n';
  }

  std::string out = header.str();
  out.reserve(out.size() + 8 * parameter_count(p));
  for_each_array(p, [&out](const std::string&, const auto& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) put_f64(out, a.data()[i]);
  });
  return out;
}

Model deserialize_model(const std::string& bytes) {
  LineReader in(bytes);
  if (bytes.compare(0, kMagic.size() + 1, std::string(kMagic) + "\n") != 0) {
    format_error(0, "bad magic, expected CWSD1");
  }
  in.next("magic");

  const long V = keyed_count(in, "vocab");
  const long D = keyed_count(in, "dim");
  const auto kernel_line = in.next("kernels");
  const size_t kernel_offset = in.line_start();
  if (kernel_line.substr(0, 7) != "kernels") format_error(kernel_offset, "expected 'kernels'");
  Architecture arch;
  arch.kernels.clear();
  {
    std::string_view rest = kernel_line.substr(7);
    while (!rest.empty()) {
      if (rest.front() != ' ') format_error(kernel_offset, "malformed kernel list");
      rest.remove_prefix(1);
      const size_t end = std::min(rest.find(' '), rest.size());
      const auto item = rest.substr(0, end);
      const size_t colon = item.find(':');
      if (colon == std::string_view::npos) format_error(kernel_offset, "kernel entry needs width:filters");
      const long width = parse_count(item.substr(0, colon), kernel_offset);
      const long filters = parse_count(item.substr(colon + 1), kernel_offset);
      if (width < 1 || filters < 1) format_error(kernel_offset, "kernel width and filters must be >= 1");
      if (!arch.kernels.empty() && width <= arch.kernels.back().width) {
        format_error(kernel_offset, "kernel widths must be strictly ascending");
      }
      arch.kernels.push_back({static_cast<int>(width), static_cast<int>(filters)});
      rest.remove_prefix(end);
    }
  }
  const long T = keyed_count(in, "tags");
  const long mask = keyed_count(in, "mask");
  if (V < 2) format_error(0, "vocab size must be >= 2");
  if (D < 1 || T < 1 || arch.kernels.empty()) format_error(0, "degenerate shape in header");
  if (mask > 1) format_error(in.line_start(), "mask must be 0 or 1");

  size_t doubles = static_cast<size_t>(V * D);
  long F = 0;
  for (const auto& k : arch.kernels) {
    doubles += static_cast<size_t>(k.filters) * (k.width * D + 1);
    F += k.filters;
  }
  doubles += static_cast<size_t>(F * T + T + T * T + T + F + 1);

  // The payload size follows from the header alone, so it occupies the
  // final bytes; the vocabulary listing must fill the gap exactly.
  const size_t listing_begin = in.pos();
  const size_t payload = doubles * 8;
  auto mismatch = [&](const std::string& detail) {
    format_error(listing_begin, "payload length mismatch: header implies " +
                                    std::to_string(payload) + " payload bytes after " +
                                    std::to_string(V - 2) + " vocabulary lines; " + detail);
  };
  if (bytes.size() < listing_begin + payload) {
    mismatch("file has only " + std::to_string(bytes.size() - listing_begin) + " bytes left");
  }
  const size_t listing_end = bytes.size() - payload;
  const std::string_view listing(bytes.data() + listing_begin, listing_end - listing_begin);
  if (!listing.empty() && listing.back() != '\n') mismatch("listing is not newline-terminated");
  if (static_cast<long>(std::count(listing.begin(), listing.end(), '\n')) != V - 2) {
    mismatch("listing has " + std::to_string(std::count(listing.begin(), listing.end(), '\n')) +
             " lines");
  }

  Model model;
  model.mask = mask == 1;
  std::unordered_set<char32_t> seen;
  for (long i = 2; i < V; ++i) {
    const auto line = in.next("vocabulary entry");
    std::u32string decoded;
    try {
      decoded = utf8::decode(line);
    } catch (const Error& e) {
      mismatch(std::string("vocabulary line is not UTF-8: ") + e.what());
    }
    if (decoded.size() != 1) mismatch("vocabulary line must hold one character");
    if (!seen.insert(decoded[0]).second) format_error(in.line_start(), "duplicate vocabulary character");
    model.vocab.add(decoded[0]);
  }

  arch.vocab_size = static_cast<int>(V);
  arch.embedding_dim = static_cast<int>(D);
  arch.num_tags = static_cast<int>(T);
  Params& p = model.params;
  p.embedding.resize(V, D);
  for (const auto& k : arch.kernels) {
    p.conv.push_back({k.width, Matrix(k.filters, k.width * D), Vector(k.filters)});
  }
  p.proj.resize(F, T);
  p.proj_bias.resize(T);
  p.trans.resize(T, T);
  p.start.resize(T);
  p.clf_u.resize(F);
  p.clf_bias.resize(1);

  const char* cursor = bytes.data() + in.pos();
  for_each_array(p, [&cursor](const std::string&, auto& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i, cursor += 8) a.data()[i] = get_f64(cursor);
  });
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write model file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open model file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "read error on " + path.string());
  return deserialize_model(bytes);
}

}  // namespace cwsd
