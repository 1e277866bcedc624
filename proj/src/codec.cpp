#include "agri/codec.hpp"

#include "agri/error.hpp"

namespace agri {

void Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Writer::count(std::size_t n) {
  if (n > 0xffffffffu) throw Error(ErrorCode::InvalidArgument, "list too long to encode");
  u32(static_cast<std::uint32_t>(n));
}

void Writer::bytes(ByteSpan data) {
  count(data.size());
  raw(data);
}

void Writer::str(std::string_view s) {
  bytes(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void Reader::fail(const std::string& what) { throw Error(ErrorCode::Malformed, what); }

void Reader::need(std::size_t n) {
  if (remaining() < n) fail("unexpected end of input");
}

std::uint8_t Reader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

bool Reader::boolean() {
  auto v = u8();
  if (v > 1) fail("boolean out of range");
  return v == 1;
}

Digest Reader::digest() {
  auto span = raw(32);
  Digest d;
  std::copy(span.begin(), span.end(), d.bytes.begin());
  return d;
}

ByteSpan Reader::raw(std::size_t n) {
  need(n);
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

Bytes Reader::bytes() {
  auto n = u32();
  auto span = raw(n);
  return Bytes(span.begin(), span.end());
}

std::string Reader::str() {
  auto n = u32();
  auto span = raw(n);
  return std::string(span.begin(), span.end());
}

std::size_t Reader::count(std::size_t min_element_size) {
  auto n = u32();
  if (min_element_size > 0 && n > remaining() / min_element_size) fail("list length exceeds input");
  return n;
}

void Reader::expect_done() {
  if (!done()) fail("trailing bytes");
}

}  // namespace agri
