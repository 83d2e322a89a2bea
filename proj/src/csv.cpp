#include "crowdgame/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace crowdgame {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> columns)
    : os_(os), column_count_(columns.size()) {
  os_ << kCsvVersionLine << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os_ << ",";
    os_ << columns[i];
  }
  os_ << "\n";
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != column_count_)
    throw std::logic_error("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ",";
    const CsvCell& c = cells[i];
    if (std::holds_alternative<std::monostate>(c)) continue;
    if (const auto* n = std::get_if<long long>(&c)) os_ << *n;
    if (const auto* u = std::get_if<std::uint64_t>(&c)) os_ << *u;
    if (const auto* d = std::get_if<double>(&c)) os_ << format_double(*d);
    if (const auto* s = std::get_if<std::string>(&c)) os_ << *s;
  }
  os_ << "\n";
}

CsvCell cell(std::optional<double> value) {
  if (!value) return std::monostate{};
  return *value;
}

}  // namespace crowdgame
