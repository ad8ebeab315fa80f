#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcfd/io.hpp"

using namespace rcfd;
using namespace rcfd::io;

namespace {

std::vector<unsigned char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

// Hand-rolled little-endian int16 encoder, independent of the library.
std::vector<unsigned char> i16le(const std::vector<int>& v) {
  std::vector<unsigned char> out;
  for (int x : v) {
    const unsigned u = static_cast<unsigned>(x) & 0xffffu;
    out.push_back(static_cast<unsigned char>(u & 0xff));
    out.push_back(static_cast<unsigned char>(u >> 8));
  }
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Decode, F64leOneAndAHalf) {
  const std::vector<unsigned char> b{0, 0, 0, 0, 0, 0, 0xf8, 0x3f};
  EXPECT_EQ(decode(b, Format::F64le), std::vector<double>{1.5});
}

TEST(Decode, CsvWithCommentAndBlankLines) {
  EXPECT_EQ(decode(bytes_of("# header\n1.0\n\n  2.0 \n"), Format::Csv), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(decode(bytes_of("3e-1"), Format::Csv), std::vector<double>{0.3});
}

TEST(Decode, I16leAgainstHandEncoder) {
  const std::vector<int> v{0, 1, -1, 32767, -32768, 1234, -4321};
  const auto out = decode(i16le(v), Format::I16le);
  ASSERT_EQ(out.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(out[i], static_cast<double>(v[i]));
}

TEST(Decode, NonFiniteReportsOffset) {
  std::vector<double> v{1.0, 2.0, std::numeric_limits<double>::quiet_NaN()};
  const auto b = encode_f64le(v);
  try {
    decode(b, Format::F64le);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
    EXPECT_NE(std::string(e.what()).find("offset 16"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { decode(bytes_of("1\ninf\n"), Format::Csv); }), ErrorKind::NonFiniteValue);
}

TEST(Decode, ParseErrors) {
  EXPECT_EQ(kind_of([] { decode(std::vector<unsigned char>(7), Format::F64le); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { decode(std::vector<unsigned char>(3), Format::I16le); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { decode(bytes_of("1.0\nabc\n"), Format::Csv); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { decode(bytes_of("1.0,2.0\n"), Format::Csv); }), ErrorKind::ParseError);
}

TEST(Format, Strings) {
  for (auto f : {Format::F64le, Format::I16le, Format::Csv}) EXPECT_EQ(format_from_string(to_string(f)), f);
  EXPECT_THROW(format_from_string("wav"), Error);
}

TEST(Files, RoundTripAndMissing) {
  const auto path = (std::filesystem::temp_directory_path() / "rcfd_io_roundtrip.f64").string();
  std::mt19937_64 g(3);
  std::normal_distribution<double> d;
  std::vector<double> v(1000);
  for (auto& x : v) x = d(g);
  write_file(path, encode_f64le(v));
  EXPECT_EQ(ingest(path, Format::F64le).vector(), v);
  std::remove(path.c_str());
  EXPECT_EQ(kind_of([&] { read_file(path); }), ErrorKind::IoError);
}

TEST(StreamReader, ChunksBinaryAndCsv) {
  std::vector<double> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) * 0.5;
  const auto b = encode_f64le(v);
  std::istringstream bin(std::string(b.begin(), b.end()));
  StreamReader r(bin, Format::F64le);
  EXPECT_EQ(r.next(4), (std::vector<double>{0, 0.5, 1, 1.5}));
  EXPECT_EQ(r.next(4).size(), 4u);
  EXPECT_EQ(r.next(4), (std::vector<double>{4, 4.5}));
  EXPECT_TRUE(r.next(4).empty());

  std::istringstream csv("# c\n1\n2\n\n3\n");
  StreamReader rc(csv, Format::Csv);
  EXPECT_EQ(rc.next(2), (std::vector<double>{1, 2}));
  EXPECT_EQ(rc.next(2), std::vector<double>{3});
}

TEST(StreamReader, BadValueInLaterChunkReportsAbsoluteOffset) {
  std::vector<double> v{1, 2, 3, std::numeric_limits<double>::infinity()};
  const auto b = encode_f64le(v);
  std::istringstream bin(std::string(b.begin(), b.end()));
  StreamReader r(bin, Format::F64le);
  r.next(2);
  try {
    r.next(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("offset 24"), std::string::npos) << e.what();
  }
}

TEST(BitFiles, RoundTripAndLayout) {
  const std::vector<std::uint8_t> bits{1, 0, 1, 1, 0, 0, 0, 0, 1, 1};
  const auto enc = encode_bits(bits);
  ASSERT_EQ(enc.size(), 10u);
  EXPECT_EQ(enc[0], 10);
  EXPECT_EQ(enc[8], 0xb0);
  EXPECT_EQ(enc[9], 0xc0);
  EXPECT_EQ(decode_bits(enc), bits);
  EXPECT_TRUE(decode_bits(encode_bits(std::vector<std::uint8_t>{})).empty());
  auto truncated = enc;
  truncated.pop_back();
  EXPECT_EQ(kind_of([&] { decode_bits(truncated); }), ErrorKind::ParseError);
}

TEST(ContentHash, FnvReference) {
  // FNV-1a of the empty string is the offset basis; of the eight zero bytes
  // of +0.0 it follows the textbook recurrence.
  EXPECT_EQ(content_hash(std::vector<double>{}), 0xcbf29ce484222325ULL);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < 8; ++i) h = (h ^ 0u) * 0x100000001b3ULL;
  EXPECT_EQ(content_hash(std::vector<double>{0.0}), h);
  EXPECT_NE(content_hash(std::vector<double>{0.0}), content_hash(std::vector<double>{-0.0}));
}

TEST(BitFiles, AsciiText) {
  EXPECT_EQ(decode_ascii_bits(bytes_of("10 11\n0")), (std::vector<std::uint8_t>{1, 0, 1, 1, 0}));
  EXPECT_EQ(kind_of([] { decode_ascii_bits(bytes_of("1012")); }), ErrorKind::ParseError);
}
