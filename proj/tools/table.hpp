#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace rabi::cli {

/// Blank cell (CSV: empty field, JSON: null).
struct Blank {};

/// A vector cell is written as ';'-joined numbers in CSV and as an array in JSON.
using Cell = std::variant<Blank, double, std::int64_t, bool, std::string, std::vector<double>>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip representation capped at 15 significant digits,
/// independent of the C locale.
std::string format_double(double v);

void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);

/// Writes `text` to `path` through a sibling temporary file and a rename.
/// Throws std::filesystem::filesystem_error or std::ios_base::failure.
void write_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace rabi::cli
