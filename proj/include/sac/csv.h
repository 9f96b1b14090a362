#ifndef SAC_CSV_H
#define SAC_CSV_H

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sac::csv {

std::string_view trim(std::string_view s);

// Splits one line on commas and trims every field. No quoting support;
// none of the formats handled here carry commas inside fields.
std::vector<std::string> split(std::string_view line);

// Reads the next non-empty line (CR and UTF-8 BOM stripped). Returns false
// at end of stream. `line_no` is advanced for every physical line consumed.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

bool parse_int(std::string_view s, long long& out);
bool parse_double(std::string_view s, double& out);

}  // namespace sac::csv

#endif  // SAC_CSV_H
