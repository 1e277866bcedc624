#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "agri/error.hpp"
#include "agri/ledger.hpp"

namespace agri {

/// Append-only block file: "AGRI", a u32 big-endian format version, then one
/// record per block (u32 big-endian length followed by the canonical block bytes).
class BlockLog {
 public:
  static constexpr std::array<std::uint8_t, 4> kMagic{'A', 'G', 'R', 'I'};
  static constexpr std::uint32_t kFormatVersion = 1;
  static constexpr std::size_t kHeaderSize = 8;

  /// Opens or creates the log. A torn trailing record is cut off. Records must
  /// decode and hash-link; anything else throws Error(CorruptLog). Full chain
  /// validation is left to the caller's replay.
  static BlockLog open(const std::filesystem::path& path);

  BlockLog(BlockLog&& other) noexcept;
  BlockLog& operator=(BlockLog&& other) noexcept;
  BlockLog(const BlockLog&) = delete;
  BlockLog& operator=(const BlockLog&) = delete;
  ~BlockLog();

  /// Writes and fsyncs one record. Throws Error(NotChild) unless the block links
  /// to the current tip (any block may start an empty log), Error(IoFailure).
  void append_block(const Block& block);

  const std::vector<Block>& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }
  Digest tip() const;
  /// Bytes discarded from a torn tail when the log was opened.
  std::uint64_t recovered_bytes() const { return recovered_bytes_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  BlockLog() = default;

  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<Block> blocks_;
  Digest tip_;
  std::uint64_t recovered_bytes_ = 0;
};

struct LogScan {
  std::vector<Block> blocks;
  std::uint64_t valid_bytes = 0;
  std::uint64_t torn_bytes = 0;
};

/// Read-only parse of log bytes with the same rules as BlockLog::open.
LogScan scan_block_log(ByteSpan bytes);

Bytes encode_log_header();
Bytes encode_log_record(const Block& block);

}  // namespace agri
