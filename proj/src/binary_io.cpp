#include "binary_io.hpp"

#include <iterator>

namespace textscape::detail {

std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

void ByteReader::expect_magic(std::string_view magic) {
  require(magic.size());
  if (std::string_view(bytes_.data() + offset_, magic.size()) != magic) {
    fail("bad magic, expected \"" + std::string(magic) + "\"");
  }
  offset_ += magic.size();
}

void ByteReader::fail(const std::string& what) const {
  throw Error(Errc::invalid_format,
              source_ + ": offset " + std::to_string(offset_) + ": " + what);
}

void ByteReader::require(std::size_t n) const {
  if (bytes_.size() - offset_ < n) fail("unexpected end of file");
}

}  // namespace textscape::detail
