#include "bsfwm/data_file.hpp"

#include <boost/crc.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bsfwm/errors.hpp"

namespace bsfwm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_checksum_line(std::string_view line) {
  const auto eq = line.find('=');
  return eq != std::string_view::npos && trim(line.substr(0, eq)) == "checksum";
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace

std::string data_file_checksum(std::string_view text) {
  boost::crc_32_type crc;
  for (auto line : split_lines(text)) {
    if (is_checksum_line(line)) continue;
    crc.process_bytes(line.data(), line.size());
    crc.process_byte('\n');
  }
  return fmt::format("{:08x}", crc.checksum());
}

DataFile DataFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open data file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

DataFile DataFile::parse(std::string_view text, std::string source_name) {
  DataFile file;
  file.source_ = std::move(source_name);
  std::string recorded;
  for (auto raw : split_lines(text)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}: malformed line '{}'", file.source_, line));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key == "checksum") {
      recorded = value;
      continue;
    }
    if (!recorded.empty()) {
      throw ConfigError(fmt::format("{}: content after checksum line", file.source_));
    }
    if (!file.values_.emplace(key, value).second) {
      throw ConfigError(fmt::format("{}: duplicate key '{}'", file.source_, key));
    }
  }
  if (recorded.empty()) throw ConfigError(fmt::format("{}: missing checksum", file.source_));
  const auto actual = "crc32:" + data_file_checksum(text);
  if (recorded != actual) {
    throw ConfigError(fmt::format("{}: checksum mismatch (recorded {}, computed {})",
                                  file.source_, recorded, actual));
  }
  return file;
}

const std::string& DataFile::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("{}: missing key '{}'", source_, key));
  return it->second;
}

std::vector<double> DataFile::numbers(const std::string& key, std::size_t expected_count) const {
  std::istringstream in(text(key));
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ConfigError(fmt::format("{}: '{}' is not a number (key '{}')", source_, token, key));
    }
    out.push_back(v);
  }
  if (out.size() != expected_count) {
    throw ConfigError(fmt::format("{}: key '{}' has {} values, expected {}", source_, key,
                                  out.size(), expected_count));
  }
  return out;
}

std::filesystem::path bundled_data_dir() {
  if (const char* env = std::getenv("BSFWM_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return BSFWM_DATA_DIR;
}

}  // namespace bsfwm
