#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace eqnorm {

// Floats at 17 significant digits so values round-trip exactly.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& field(double x);
  CsvWriter& field(std::int64_t x);
  CsvWriter& field(std::uint64_t x);
  CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& field(bool x);
  CsvWriter& field(std::string_view s);
  void end_row();

 private:
  void sep();

  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace eqnorm
