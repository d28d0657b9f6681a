#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "seqclf/error.hpp"

namespace seqclf::binary {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write_array(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
T read(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorKind::MalformedFile, "unexpected end of binary data");
  }
  return value;
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void read_array(std::istream& in, T* data, std::size_t count) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)))) {
    throw Error(ErrorKind::MalformedFile, "unexpected end of binary data");
  }
}

inline void write_string(std::ostream& out, const std::string& s) {
  write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const auto size = read<std::uint32_t>(in);
  std::string s(size, '\0');
  if (size != 0 && !in.read(s.data(), size)) throw Error(ErrorKind::MalformedFile, "truncated string");
  return s;
}

inline void expect_magic(std::istream& in, std::string_view magic) {
  std::string buffer(magic.size(), '\0');
  if (!in.read(buffer.data(), static_cast<std::streamsize>(buffer.size())) || buffer != magic) {
    throw Error(ErrorKind::MalformedFile, "bad magic bytes, expected '" + std::string(magic) + "'");
  }
}

}  // namespace seqclf::binary
