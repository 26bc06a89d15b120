#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace egolex::csv {

/// Reals use 6 significant digits; NaN is written as an empty field.
std::string real(double v);
std::string quote(std::string_view field);

/// Buffered writer; the file is written on close() or destruction.
class Writer {
 public:
  Writer(std::filesystem::path path, std::vector<std::string> header);
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;
  ~Writer();

  Writer& row(const std::vector<std::string>& fields);
  std::size_t rows() const { return rows_; }
  void close();

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::string buf_;
  std::size_t rows_ = 0;
  bool closed_ = false;
};

inline std::string field(std::string_view s) { return std::string(s); }
inline std::string field(const char* s) { return s; }
inline std::string field(const std::string& s) { return s; }
inline std::string field(double v) { return real(v); }
template <class I>
  requires std::is_integral_v<I>
std::string field(I v) {
  return std::to_string(v);
}

}  // namespace egolex::csv
