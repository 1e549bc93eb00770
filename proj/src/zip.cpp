#include "muselet/zip.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>

#include "muselet/error.hpp"

namespace muselet::zip {
namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::MalformedContainer, why); }

std::uint32_t read_u16(std::string_view buf, std::size_t at) {
  if (at + 2 > buf.size()) corrupt("truncated archive");
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + at);
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8);
}

std::uint32_t read_u32(std::string_view buf, std::size_t at) {
  return read_u16(buf, at) | (read_u16(buf, at + 2) << 16);
}

struct Entry {
  std::string name;
  std::uint32_t method;
  std::uint32_t compressed_size;
  std::uint32_t uncompressed_size;
  std::uint32_t local_offset;
};

std::vector<Entry> central_directory(std::string_view archive) {
  if (archive.size() < 22) corrupt("archive too small");
  // The end record sits within the last 22 + 65535 bytes (trailing comment).
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = archive.size() > 22 + 65535 ? archive.size() - 22 - 65535 : 0;
  for (std::size_t at = archive.size() - 22 + 1; at-- > lowest;) {
    if (read_u32(archive, at) == kEndOfCentralDir) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string_view::npos) corrupt("no end-of-central-directory record");

  const std::uint32_t count = read_u16(archive, eocd + 10);
  std::size_t at = read_u32(archive, eocd + 16);
  std::vector<Entry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (read_u32(archive, at) != kCentralHeader) corrupt("bad central directory header");
    Entry e;
    e.method = read_u16(archive, at + 10);
    e.compressed_size = read_u32(archive, at + 20);
    e.uncompressed_size = read_u32(archive, at + 24);
    const std::uint32_t name_len = read_u16(archive, at + 28);
    const std::uint32_t extra_len = read_u16(archive, at + 30);
    const std::uint32_t comment_len = read_u16(archive, at + 32);
    e.local_offset = read_u32(archive, at + 42);
    if (at + 46 + name_len > archive.size()) corrupt("truncated entry name");
    e.name.assign(archive.substr(at + 46, name_len));
    if (e.compressed_size == 0xFFFFFFFF || e.local_offset == 0xFFFFFFFF) corrupt("zip64 archives are not supported");
    entries.push_back(std::move(e));
    at += 46 + name_len + extra_len + comment_len;
  }
  return entries;
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) corrupt("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) corrupt("deflate stream is corrupt");
  return out;
}

}  // namespace

std::vector<std::string> list_entries(std::string_view archive) {
  std::vector<std::string> names;
  for (auto& e : central_directory(archive)) names.push_back(std::move(e.name));
  return names;
}

std::optional<std::string> read_entry(std::string_view archive, std::string_view name) {
  for (const Entry& e : central_directory(archive)) {
    if (e.name != name) continue;
    const std::size_t at = e.local_offset;
    if (read_u32(archive, at) != kLocalHeader) corrupt("bad local header for " + e.name);
    const std::size_t data_at = at + 30 + read_u16(archive, at + 26) + read_u16(archive, at + 28);
    if (data_at + e.compressed_size > archive.size()) corrupt("truncated entry data for " + e.name);
    const std::string_view data = archive.substr(data_at, e.compressed_size);
    switch (e.method) {
      case 0: return std::string(data);
      case 8: return inflate_raw(data, e.uncompressed_size);
      default: corrupt("unsupported compression method " + std::to_string(e.method));
    }
  }
  return std::nullopt;
}

}  // namespace muselet::zip
