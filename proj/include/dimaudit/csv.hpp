#pragma once

// Minimal CSV support: header-row files, comma separated, double quotes with
// "" escaping. Doubles are written in shortest round-trip form so emitted
// files parse back bit-exactly.

#include <string>
#include <vector>

namespace dimaudit::csv {

// Splits one CSV record. Quoted fields may contain commas and escaped quotes.
std::vector<std::string> split_record(const std::string& line);

// Reads all records of a file; first record is the header. Skips blank lines.
// Throws on a missing file.
std::vector<std::vector<std::string>> read_file(const std::string& path);

std::string quote_field(const std::string& field);

// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

// Returns false when the cell does not parse as a finite number.
bool parse_double(const std::string& cell, double& out);

} // namespace dimaudit::csv
