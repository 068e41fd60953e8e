// SPDX-License-Identifier: Apache-2.0

#include "ucsim/frame_codec.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace ucsim {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view text) {
  Bytes out;
  int hi = -1;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (hi >= 0) throw std::invalid_argument("odd hex digit count");
      continue;
    }
    int v = hex_value(c);
    if (v < 0) throw std::invalid_argument(std::string("bad hex digit '") + c + "'");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi << 4 | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw std::invalid_argument("odd hex digit count");
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(kDigits[bytes[i] >> 4]);
    out.push_back(kDigits[bytes[i] & 0xF]);
  }
  return out;
}

Address parse_address(std::string_view text) {
  Bytes b = from_hex(text);
  if (b.size() != 6) throw std::invalid_argument("address must be exactly 6 octets: '" + std::string(text) + "'");
  Address a;
  std::copy(b.begin(), b.end(), a.bytes.begin());
  return a;
}

std::string to_string(const Address& addr) { return to_hex(addr.bytes); }

const char* to_string(CodecErrorKind kind) {
  switch (kind) {
    case CodecErrorKind::Truncated: return "Truncated";
    case CodecErrorKind::LengthMismatch: return "LengthMismatch";
    case CodecErrorKind::SumCheckFailed: return "SumCheckFailed";
    case CodecErrorKind::XorCheckFailed: return "XorCheckFailed";
  }
  return "?";
}

Checks compute_checks(std::span<const std::uint8_t> span) {
  Checks c;
  for (std::uint8_t b : span) {
    c.sum = static_cast<std::uint8_t>(c.sum + b);
    c.xr ^= b;
  }
  return c;
}

Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) throw std::length_error("payload longer than 255 bytes");
  Bytes out;
  out.reserve(kFrameOverhead + frame.payload.size());
  out.push_back(frame.relay_depth);
  out.insert(out.end(), frame.address.bytes.begin(), frame.address.bytes.end());
  out.push_back(static_cast<std::uint8_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  Checks c = compute_checks(out);
  out.push_back(c.sum);
  out.push_back(c.xr);
  return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameOverhead) return CodecError{CodecErrorKind::Truncated, bytes.size()};
  const std::size_t length = bytes[7];
  const std::size_t total = kFrameOverhead + length;
  if (bytes.size() < total) return CodecError{CodecErrorKind::Truncated, bytes.size()};
  if (bytes.size() > total) return CodecError{CodecErrorKind::LengthMismatch, 7};

  const std::size_t body = total - 2;
  Checks c = compute_checks(bytes.first(body));
  if (c.sum != bytes[body]) return CodecError{CodecErrorKind::SumCheckFailed, body};
  if (c.xr != bytes[body + 1]) return CodecError{CodecErrorKind::XorCheckFailed, body + 1};

  Frame f;
  f.relay_depth = bytes[0];
  std::copy(bytes.begin() + 1, bytes.begin() + 7, f.address.bytes.begin());
  f.payload.assign(bytes.begin() + 8, bytes.begin() + static_cast<std::ptrdiff_t>(body));
  return f;
}

}  // namespace ucsim
