// SPDX-License-Identifier: Apache-2.0
//
// frame_codec.hpp
// Wire format of the addressed polling frame:
//
//   [relay_depth][address x6][length][payload x length][sum][xor]
//
// Both trailer bytes cover relay_depth through the last payload byte.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ucsim {

using Bytes = std::vector<std::uint8_t>;

struct Address {
  std::array<std::uint8_t, 6> bytes{};

  friend bool operator==(const Address&, const Address&) = default;
  friend auto operator<=>(const Address&, const Address&) = default;
};

/// Parses "64 49 46 68 00 53" (whitespace optional between octets).
/// Throws std::invalid_argument on anything that is not exactly six octets.
Address parse_address(std::string_view text);
std::string to_string(const Address& addr);

struct Frame {
  std::uint8_t relay_depth = 0;
  Address address;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

constexpr std::size_t kFrameOverhead = 10;
constexpr std::size_t kMaxPayload = 255;

enum class CodecErrorKind { Truncated, LengthMismatch, SumCheckFailed, XorCheckFailed };

struct CodecError {
  CodecErrorKind kind;
  std::size_t offset;

  friend bool operator==(const CodecError&, const CodecError&) = default;
};

const char* to_string(CodecErrorKind kind);

struct Checks {
  std::uint8_t sum = 0;
  std::uint8_t xr = 0;

  friend bool operator==(const Checks&, const Checks&) = default;
};

Checks compute_checks(std::span<const std::uint8_t> span);

/// Throws std::length_error if the payload exceeds 255 bytes.
Bytes encode_frame(const Frame& frame);

using DecodeResult = std::variant<Frame, CodecError>;

/// Input must hold exactly one frame. Short input is Truncated; bytes beyond
/// 9 + length are a LengthMismatch. A sum failure is reported ahead of an
/// xor failure when both trailers disagree.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

inline bool address_matches(const Address& frame_addr, const Address& node_addr) {
  return frame_addr == node_addr;
}

/// Lowercase, space separated ("01 64 49 ...").
std::string to_hex(std::span<const std::uint8_t> bytes);
/// Inverse of to_hex; accepts upper or lower case. Throws std::invalid_argument.
Bytes from_hex(std::string_view text);

}  // namespace ucsim
