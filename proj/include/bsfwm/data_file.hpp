#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bsfwm {

/// A checksummed `key = value` text file as used for the bundled model data.
///
/// Lines starting with `#` are comments. The last significant line must be
/// `checksum = crc32:XXXXXXXX`, the CRC-32 of every other line (each with its
/// trailing newline) in file order. Keys are unique.
class DataFile {
 public:
  static DataFile load(const std::filesystem::path& path);
  static DataFile parse(std::string_view text, std::string source_name = "<memory>");

  const std::string& source() const { return source_; }
  bool contains(const std::string& key) const { return values_.contains(key); }
  const std::string& text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::size_t expected_count) const;

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

/// CRC-32 of the checksummed body of a data file, as lowercase hex.
std::string data_file_checksum(std::string_view text);

/// Directory holding the bundled data files. Honours `BSFWM_DATA_DIR`.
std::filesystem::path bundled_data_dir();

}  // namespace bsfwm
