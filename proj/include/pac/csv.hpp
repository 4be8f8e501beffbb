//
// RFC-4180 CSV reading (schema-driven, never type-guessing) and writing.
// An unquoted empty cell or \N is NULL; a quoted empty cell is the empty string.
//

#ifndef PAC_CSV_HPP
#define PAC_CSV_HPP

#include "pac/value.hpp"

#include <iosfwd>
#include <string>

namespace pac {

Relation ReadCsv(std::istream &in, const Schema &schema, const std::string &source = "<input>");
Relation ReadCsvFile(const std::string &path, const Schema &schema);

void WriteCsv(std::ostream &out, const Relation &rel, bool header = true);
std::string ToCsv(const Relation &rel, bool header = true);
void WriteCsvFile(const std::string &path, const Relation &rel);

Relation ParseCsv(const std::string &text, const Schema &schema);

} // namespace pac

#endif // PAC_CSV_HPP
