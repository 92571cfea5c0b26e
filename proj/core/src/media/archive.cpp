#include "natalia/media/archive.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "natalia/common/error.hpp"
#include "natalia/media/codec.hpp"

namespace natalia::media {
namespace {

constexpr std::size_t kBlock = 512;

void put_octal(std::uint8_t* field, std::size_t width, std::uint64_t value) {
  // width - 1 octal digits followed by NUL
  std::memset(field, '0', width - 1);
  field[width - 1] = '\0';
  for (std::size_t i = width - 1; i-- > 0 && value != 0;) {
    field[i] = static_cast<std::uint8_t>('0' + (value & 7u));
    value >>= 3;
  }
}

std::uint64_t parse_octal(const std::uint8_t* field, std::size_t width) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const auto c = field[i];
    if (c == '\0' || c == ' ') {
      if (value != 0) break;
      continue;
    }
    if (c < '0' || c > '7') {
      throw Error(ErrorCode::CorruptStream, "tar header: bad octal field");
    }
    value = (value << 3) | static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

std::uint64_t header_checksum(const std::uint8_t* header) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    sum += (i >= 148 && i < 156) ? ' ' : header[i];
  }
  return sum;
}

}  // namespace

bool looks_like_tar(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= kBlock && std::memcmp(bytes.data() + 257, "ustar", 5) == 0;
}

std::vector<std::uint8_t> write_tar(std::span<const ArchiveMember> members) {
  std::vector<const ArchiveMember*> sorted;
  for (const auto& m : members) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });

  std::vector<std::uint8_t> out;
  for (const ArchiveMember* m : sorted) {
    if (m->name.empty() || m->name.size() > 99) {
      throw Error(ErrorCode::InvalidArgument, "tar member name must be 1..99 bytes");
    }
    std::array<std::uint8_t, kBlock> header{};
    std::memcpy(header.data(), m->name.data(), m->name.size());
    put_octal(header.data() + 100, 8, 0644);
    put_octal(header.data() + 108, 8, 0);
    put_octal(header.data() + 116, 8, 0);
    put_octal(header.data() + 124, 12, m->data.size());
    put_octal(header.data() + 136, 12, 0);
    header[156] = '0';
    std::memcpy(header.data() + 257, "ustar", 6);
    std::memcpy(header.data() + 263, "00", 2);
    const auto sum = header_checksum(header.data());
    put_octal(header.data() + 148, 7, sum);
    header[155] = ' ';
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), m->data.begin(), m->data.end());
    out.resize(out.size() + (kBlock - m->data.size() % kBlock) % kBlock, 0);
  }
  out.resize(out.size() + 2 * kBlock, 0);
  return out;
}

std::vector<ArchiveMember> read_tar(std::span<const std::uint8_t> bytes) {
  std::vector<ArchiveMember> members;
  std::size_t pos = 0;
  while (true) {
    if (pos + kBlock > bytes.size()) {
      throw Error(ErrorCode::CorruptStream, "tar archive truncated in header");
    }
    const std::uint8_t* header = bytes.data() + pos;
    if (std::all_of(header, header + kBlock, [](auto c) { return c == 0; })) {
      break;
    }
    const auto stored = parse_octal(header + 148, 8);
    if (stored != header_checksum(header)) {
      throw Error(ErrorCode::CorruptStream, "tar header checksum mismatch");
    }
    const auto size = parse_octal(header + 124, 12);
    const char type = static_cast<char>(header[156]);
    std::string name(reinterpret_cast<const char*>(header),
                     strnlen(reinterpret_cast<const char*>(header), 100));
    const std::size_t data_pos = pos + kBlock;
    if (data_pos + size > bytes.size()) {
      throw Error(ErrorCode::CorruptStream, "tar member '" + name + "' truncated");
    }
    if (type == '0' || type == '\0') {
      members.push_back({std::move(name),
                         {bytes.begin() + static_cast<std::ptrdiff_t>(data_pos),
                          bytes.begin() + static_cast<std::ptrdiff_t>(data_pos + size)}});
    }
    pos = data_pos + size + (kBlock - size % kBlock) % kBlock;
  }
  return members;
}

std::vector<std::uint8_t> pack_directory(const std::filesystem::path& dir) {
  std::vector<ArchiveMember> members;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    members.push_back({entry.path().filename().string(), read_file(entry.path())});
  }
  return write_tar(members);
}

}  // namespace natalia::media
