#include "agri/blocklog.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <utility>

namespace agri {

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& path) {
  throw Error(ErrorCode::IoFailure, what + " " + path.string() + ": " + std::strerror(errno));
}

std::uint32_t read_u32(ByteSpan b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

void write_all(int fd, ByteSpan data, const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write", path);
    }
    done += static_cast<std::size_t>(n);
  }
}

Bytes read_file(int fd, const std::filesystem::path& path) {
  Bytes out;
  std::uint8_t buf[1 << 16];
  for (;;) {
    auto n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("read", path);
    }
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  return out;
}

}  // namespace

Bytes encode_log_header() {
  Writer w;
  w.raw(BlockLog::kMagic);
  w.u32(BlockLog::kFormatVersion);
  return w.take();
}

Bytes encode_log_record(const Block& block) {
  Writer w;
  w.bytes(encode_block(block));
  return w.take();
}

LogScan scan_block_log(ByteSpan bytes) {
  LogScan scan;
  auto header = encode_log_header();
  if (bytes.size() < header.size()) {
    // A crash while writing the header leaves a prefix of it.
    if (!std::equal(bytes.begin(), bytes.end(), header.begin())) throw Error(ErrorCode::CorruptLog, "bad header");
    scan.torn_bytes = bytes.size();
    return scan;
  }
  if (!std::equal(header.begin(), header.begin() + 4, bytes.begin())) throw Error(ErrorCode::CorruptLog, "bad magic");
  if (read_u32(bytes, 4) != BlockLog::kFormatVersion) throw Error(ErrorCode::CorruptLog, "unsupported format version");

  std::size_t pos = header.size();
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) break;
    auto len = read_u32(bytes, pos);
    if (bytes.size() - pos - 4 < len) break;
    Block block;
    try {
      block = decode_block(bytes.subspan(pos + 4, len));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptLog, "record " + std::to_string(scan.blocks.size()) + ": " + e.what());
    }
    if (!scan.blocks.empty() && block.header.prev_hash != scan.blocks.back().hash())
      throw Error(ErrorCode::CorruptLog, "record " + std::to_string(scan.blocks.size()) + " does not link to its predecessor");
    scan.blocks.push_back(std::move(block));
    pos += 4 + len;
  }
  scan.valid_bytes = pos;
  scan.torn_bytes = bytes.size() - pos;
  return scan;
}

BlockLog BlockLog::open(const std::filesystem::path& path) {
  BlockLog log;
  log.path_ = path;
  log.fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (log.fd_ < 0) io_fail("open", path);

  auto bytes = read_file(log.fd_, path);
  auto scan = scan_block_log(bytes);
  if (scan.blocks.empty() && scan.valid_bytes == 0) {
    // Empty file or torn header: start over.
    if (::ftruncate(log.fd_, 0) != 0) io_fail("truncate", path);
    if (::lseek(log.fd_, 0, SEEK_SET) < 0) io_fail("seek", path);
    write_all(log.fd_, encode_log_header(), path);
    if (::fsync(log.fd_) != 0) io_fail("fsync", path);
  } else if (scan.torn_bytes > 0) {
    if (::ftruncate(log.fd_, static_cast<off_t>(scan.valid_bytes)) != 0) io_fail("truncate", path);
    if (::fsync(log.fd_) != 0) io_fail("fsync", path);
  }
  if (::lseek(log.fd_, 0, SEEK_END) < 0) io_fail("seek", path);

  log.recovered_bytes_ = scan.torn_bytes;
  log.blocks_ = std::move(scan.blocks);
  if (!log.blocks_.empty()) log.tip_ = log.blocks_.back().hash();
  return log;
}

BlockLog::BlockLog(BlockLog&& other) noexcept { *this = std::move(other); }

BlockLog& BlockLog::operator=(BlockLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    blocks_ = std::move(other.blocks_);
    tip_ = other.tip_;
    recovered_bytes_ = other.recovered_bytes_;
  }
  return *this;
}

BlockLog::~BlockLog() {
  if (fd_ >= 0) ::close(fd_);
}

Digest BlockLog::tip() const {
  if (blocks_.empty()) throw Error(ErrorCode::EmptyChain, "log has no blocks");
  return tip_;
}

void BlockLog::append_block(const Block& block) {
  if (!blocks_.empty() && block.header.prev_hash != tip_)
    throw Error(ErrorCode::NotChild, "block does not extend the log tip " + tip_.hex());
  write_all(fd_, encode_log_record(block), path_);
  if (::fsync(fd_) != 0) io_fail("fsync", path_);
  blocks_.push_back(block);
  tip_ = block.hash();
}

}  // namespace agri
