#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "textscape/error.hpp"

namespace textscape::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::vector<char> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

/// Cursor over a little-endian byte buffer. Errors report the byte offset.
class ByteReader {
 public:
  ByteReader(const std::vector<char>& bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  template <typename T>
  T read() {
    static_assert(std::is_trivially_copyable_v<T>);
    require(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  void expect_magic(std::string_view magic);
  std::size_t offset() const { return offset_; }
  bool at_end() const { return offset_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - offset_; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void require(std::size_t n) const;

  const std::vector<char>& bytes_;
  std::string source_;
  std::size_t offset_ = 0;
};

class ByteWriter {
 public:
  template <typename T>
  void write(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    buffer_.append(raw, sizeof(T));
  }
  void write_raw(std::string_view bytes) { buffer_.append(bytes); }
  const std::string& bytes() const { return buffer_; }

 private:
  std::string buffer_;
};

}  // namespace textscape::detail
