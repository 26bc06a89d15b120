#include "egolex/csv.hpp"

#include <cmath>

#include <fmt/format.h>

#include "egolex/error.hpp"

namespace egolex::csv {

std::string real(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.6g}", v);
}

std::string quote(std::string_view f) {
  if (f.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Writer::Writer(std::filesystem::path path, std::vector<std::string> header)
    : path_(std::move(path)), width_(header.size()) {
  row(header);
  rows_ = 0;
}

Writer::~Writer() {
  try {
    close();
  } catch (...) {
  }
}

Writer& Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) {
    throw Error(fmt::format("{}: row has {} fields, header has {}", path_.string(), fields.size(), width_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += quote(fields[i]);
  }
  buf_ += '\n';
  ++rows_;
  return *this;
}

void Writer::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path_.string()));
  out << buf_;
  if (!out) throw Error(fmt::format("write failed for {}", path_.string()));
}

}  // namespace egolex::csv
