// CSV emission with a fixed schema version line. Comma separated, '.' decimal
// point, header row after the version line. Missing estimates are emitted as
// empty fields, never as zeros.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace crowdgame {

inline constexpr const char* kCsvVersionLine = "# crowdgame-csv v1";

using CsvCell =
    std::variant<std::monostate, long long, double, std::string, std::uint64_t>;

// Locale-independent "%.10g" rendering.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> columns);
  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& os_;
  std::size_t column_count_;
};

// Convenience for optional estimates: empty cell when absent.
CsvCell cell(std::optional<double> value);

}  // namespace crowdgame
