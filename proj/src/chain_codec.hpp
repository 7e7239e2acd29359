#pragma once

// Canonical little-endian encoding shared by transactions and blocks.

#include <algorithm>
#include <cstdint>
#include <string>

#include "mecco/chain.hpp"

namespace mecco::chain::detail {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void fixed(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void bytes(ByteView b) {
    u32(static_cast<std::uint32_t>(b.size()));
    fixed(b);
  }
  void str(const std::string& s) {
    bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  Reader(ByteView in, std::size_t base_offset = 0) : in_(in), base_(base_offset) {}

  std::uint8_t u8() {
    need(1, "u8");
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    need(N, "fixed-width field");
    std::array<std::uint8_t, N> a{};
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), N, a.begin());
    pos_ += N;
    return a;
  }
  ByteView bytes() {
    const std::uint32_t n = u32();
    need(n, "length-prefixed field");
    ByteView v = in_.subspan(pos_, n);
    pos_ += n;
    return v;
  }
  std::string str() {
    ByteView v = bytes();
    return std::string(v.begin(), v.end());
  }
  void expect_end() const {
    if (pos_ != in_.size()) throw DecodeError("trailing bytes", base_ + pos_);
  }
  std::size_t offset() const { return base_ + pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) throw DecodeError(std::string("truncated ") + what, base_ + pos_);
  }

  ByteView in_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

}  // namespace mecco::chain::detail
