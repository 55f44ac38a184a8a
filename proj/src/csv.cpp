#include "eqnorm/csv.hpp"

#include <cstdio>

#include "eqnorm/error.hpp"

namespace eqnorm {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  for (auto h : header) field(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::field(double x) {
  sep();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(bool x) {
  sep();
  out_ << (x ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw Error("CSV row has the wrong number of fields");
  out_ << '\n';
  in_row_ = 0;
  if (!out_) throw Error("CSV write failed");
}

}  // namespace eqnorm
