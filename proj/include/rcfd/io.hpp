#pragma once

// Raw-stream ingestion (f64le, i16le, csv) and the packed bit-file format.

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcfd/error.hpp"
#include "rcfd/series.hpp"

namespace rcfd::io {

enum class Format { F64le, I16le, Csv };

inline Format format_from_string(std::string_view s) {
  if (s == "f64le") return Format::F64le;
  if (s == "i16le") return Format::I16le;
  if (s == "csv") return Format::Csv;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + std::string(s) + "'");
}

inline const char* to_string(Format f) {
  switch (f) {
    case Format::F64le: return "f64le";
    case Format::I16le: return "i16le";
    case Format::Csv: return "csv";
  }
  return "unknown";
}

namespace detail {

inline std::uint64_t load_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void store_u64le(std::uint64_t v, unsigned char* p) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Decodes a whole buffer; `base_offset` only affects error messages.
inline std::vector<double> decode(std::span<const unsigned char> bytes, Format format, std::size_t base_offset = 0) {
  std::vector<double> out;
  switch (format) {
    case Format::F64le: {
      if (bytes.size() % 8 != 0) {
        throw Error(ErrorKind::ParseError, "f64le input length " + std::to_string(bytes.size()) +
                                               " is not a multiple of 8");
      }
      out.reserve(bytes.size() / 8);
      for (std::size_t off = 0; off < bytes.size(); off += 8) {
        const double v = std::bit_cast<double>(detail::load_u64le(bytes.data() + off));
        if (!std::isfinite(v)) {
          throw Error(ErrorKind::NonFiniteValue, "non-finite value at byte offset " + std::to_string(base_offset + off));
        }
        out.push_back(v);
      }
      break;
    }
    case Format::I16le: {
      if (bytes.size() % 2 != 0) {
        throw Error(ErrorKind::ParseError, "i16le input length " + std::to_string(bytes.size()) + " is odd");
      }
      out.reserve(bytes.size() / 2);
      for (std::size_t off = 0; off < bytes.size(); off += 2) {
        const auto u = static_cast<std::uint16_t>(bytes[off] | (bytes[off + 1] << 8));
        out.push_back(static_cast<double>(static_cast<std::int16_t>(u)));
      }
      break;
    }
    case Format::Csv: {
      const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      std::size_t line_no = 0;
      std::size_t pos = 0;
      while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
        ++line_no;
        if (!line.empty() && line.front() != '#') {
          double v = 0.0;
          const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
          if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": '" + std::string(line) + "'");
          }
          if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteValue, "non-finite value at line " + std::to_string(line_no));
          }
          out.push_back(v);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
      }
      break;
    }
  }
  return out;
}

inline std::vector<unsigned char> read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  auto bytes = read_all(in);
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed on '" + path + "'");
  return bytes;
}

/// Reads a raw stream file into a Series.
inline Series ingest(const std::string& path, Format format) {
  const auto bytes = read_file(path);
  return Series(decode(bytes, format));
}

/// Pulls up to `count` samples from a binary or text stream. Used by the
/// chunked monitor; returns fewer values only at end of input.
class StreamReader {
 public:
  StreamReader(std::istream& in, Format format) : in_(in), format_(format) {}

  std::vector<double> next(std::size_t count) {
    if (format_ == Format::Csv) {
      std::vector<double> out;
      std::string line;
      while (out.size() < count && std::getline(in_, line)) {
        ++line_no_;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto v = decode(std::span(reinterpret_cast<const unsigned char*>(t.data()), t.size()), Format::Csv);
        if (v.size() != 1) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no_));
        out.push_back(v.front());
      }
      return out;
    }
    const std::size_t width = format_ == Format::F64le ? 8 : 2;
    std::vector<unsigned char> buf(count * width);
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in_.gcount());
    buf.resize(got - got % width);
    auto values = decode(buf, format_, offset_);
    offset_ += got;
    return values;
  }

 private:
  std::istream& in_;
  Format format_;
  std::size_t offset_ = 0;
  std::size_t line_no_ = 0;
};

inline std::vector<unsigned char> encode_f64le(std::span<const double> values) {
  std::vector<unsigned char> out(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    detail::store_u64le(std::bit_cast<std::uint64_t>(values[i]), out.data() + 8 * i);
  }
  return out;
}

inline void write_file(const std::string& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed on '" + path + "'");
}

// Bit files: 8-byte little-endian bit count, then bits packed MSB first.

inline std::vector<unsigned char> encode_bits(std::span<const std::uint8_t> bits) {
  std::vector<unsigned char> out(8 + (bits.size() + 7) / 8, 0);
  detail::store_u64le(bits.size(), out.data());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[8 + i / 8] |= static_cast<unsigned char>(0x80u >> (i % 8));
  }
  return out;
}

inline std::vector<std::uint8_t> decode_bits(std::span<const unsigned char> bytes) {
  if (bytes.size() < 8) throw Error(ErrorKind::ParseError, "bit file shorter than its 8-byte header");
  const std::uint64_t count = detail::load_u64le(bytes.data());
  if ((bytes.size() - 8) * 8 < count) {
    throw Error(ErrorKind::ParseError, "bit file declares " + std::to_string(count) + " bits but holds " +
                                           std::to_string((bytes.size() - 8) * 8));
  }
  std::vector<std::uint8_t> bits(count);
  for (std::size_t i = 0; i < count; ++i) bits[i] = (bytes[8 + i / 8] >> (7 - i % 8)) & 1u;
  return bits;
}

/// Text bit files: '0' and '1' characters, whitespace ignored.
inline std::vector<std::uint8_t> decode_ascii_bits(std::span<const unsigned char> bytes) {
  std::vector<std::uint8_t> bits;
  bits.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const unsigned char c = bytes[i];
    if (c == '0' || c == '1') {
      bits.push_back(c == '1');
    } else if (!std::isspace(c)) {
      throw Error(ErrorKind::ParseError, "unexpected character in text bit file at byte " + std::to_string(i));
    }
  }
  return bits;
}

/// FNV-1a over the f64le encoding of the samples.
inline std::uint64_t content_hash(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace rcfd::io
