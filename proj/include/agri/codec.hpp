#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "agri/digest.hpp"

namespace agri {

// Canonical wire conventions shared by every on-chain object: big-endian
// fixed-width integers, fields in declared order, u32 length prefix on byte
// strings and lists, one-byte tags for variants and enums.

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void digest(const Digest& d) { raw(d.bytes); }
  void raw(ByteSpan data) { out_.insert(out_.end(), data.begin(), data.end()); }
  void bytes(ByteSpan data);
  void str(std::string_view s);
  void count(std::size_t n);

  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

/// Strict reader: every malformed input throws Error(Malformed). Decoders built on
/// it accept only canonical bytes, so decode(encode(x)) == x and encode is injective.
class Reader {
 public:
  explicit Reader(ByteSpan in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool boolean();
  Digest digest();
  ByteSpan raw(std::size_t n);
  Bytes bytes();
  std::string str();
  /// List length; rejects counts that could not fit in the remaining input.
  std::size_t count(std::size_t min_element_size = 1);

  template <typename Enum>
  Enum tag(std::uint8_t max_value) {
    auto v = u8();
    if (v > max_value) fail("enum tag out of range");
    return static_cast<Enum>(v);
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }
  void expect_done();

  [[noreturn]] static void fail(const std::string& what);

 private:
  void need(std::size_t n);

  ByteSpan in_;
  std::size_t pos_ = 0;
};

}  // namespace agri
