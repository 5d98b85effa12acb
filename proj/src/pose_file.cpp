#include "posegate/pose_file.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "posegate/error.hpp"

namespace posegate {

namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double ParseDouble(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error::Parse(line, "invalid number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error::Parse(line, "non-finite number '" + std::string(token) + "'");
  }
  return value;
}

void AppendDouble(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::vector<PoseRecord> ParsePoseText(std::string_view text) {
  std::vector<PoseRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::vector<std::string_view> tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    if (tokens.size() != 8) {
      throw Error::Parse(line_no, "expected 8 fields (image_id tx ty tz qw qx qy qz), got " +
                                      std::to_string(tokens.size()));
    }
    std::array<double, 7> v{};
    for (std::size_t k = 0; k < 7; ++k) v[k] = ParseDouble(tokens[k + 1], line_no);
    try {
      records.push_back({std::string(tokens[0]), Pose::FromArray(v), line_no});
    } catch (const Error& e) {
      throw Error::Parse(line_no, e.what());
    }
    if (eol == text.size()) break;
  }
  return records;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<PoseRecord> ReadPoseFile(const std::filesystem::path& path) {
  return ParsePoseText(ReadTextFile(path));
}

std::string FormatPoseRecords(std::span<const PoseRecord> records) {
  std::string out;
  for (const PoseRecord& r : records) {
    out += r.image_id;
    for (double v : r.pose.ToArray()) {
      out += ' ';
      AppendDouble(out, v);
    }
    out += '\n';
  }
  return out;
}

void WritePoseFile(const std::filesystem::path& path, std::span<const PoseRecord> records,
                   std::string_view header_comment) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << FormatPoseRecords(records);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace posegate
