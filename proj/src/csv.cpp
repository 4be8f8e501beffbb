#include "pac/csv.hpp"

#include "pac/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pac {

namespace {

struct Cell {
	std::string text;
	bool quoted = false;
};

// returns false at end of input
bool ReadRecord(std::istream &in, std::vector<Cell> &out, size_t &line) {
	out.clear();
	int c = in.peek();
	if (c == EOF) {
		return false;
	}
	Cell cell;
	bool in_quotes = false;
	bool after_quote = false;
	while (true) {
		c = in.get();
		if (c == EOF) {
			if (in_quotes) {
				throw PacError(ErrorCode::DataError, "unterminated quoted field at line " + std::to_string(line));
			}
			out.push_back(std::move(cell));
			return true;
		}
		char ch = char(c);
		if (in_quotes) {
			if (ch == '"') {
				if (in.peek() == '"') {
					in.get();
					cell.text += '"';
				} else {
					in_quotes = false;
					after_quote = true;
				}
			} else {
				if (ch == '\n') {
					line++;
				}
				cell.text += ch;
			}
			continue;
		}
		if (ch == ',') {
			out.push_back(std::move(cell));
			cell = Cell();
			after_quote = false;
		} else if (ch == '\r' && in.peek() == '\n') {
			continue;
		} else if (ch == '\n') {
			line++;
			out.push_back(std::move(cell));
			return true;
		} else if (ch == '"' && cell.text.empty() && !cell.quoted) {
			in_quotes = true;
			cell.quoted = true;
		} else {
			if (after_quote) {
				throw PacError(ErrorCode::DataError, "text after closing quote at line " + std::to_string(line));
			}
			cell.text += ch;
		}
	}
}

Value ParseCell(const Cell &cell, const Column &col, size_t line) {
	if (!cell.quoted && (cell.text.empty() || cell.text == "\\N")) {
		if (!col.nullable) {
			throw PacError(ErrorCode::DataError,
			               "NULL in NOT NULL column " + col.name + " at line " + std::to_string(line));
		}
		return Value::Null();
	}
	const std::string &s = cell.text;
	auto bad = [&]() -> PacError {
		return PacError(ErrorCode::DataError, "cannot parse '" + s + "' as " + TypeName(col.type) + " in column " +
		                                          col.name + " at line " + std::to_string(line));
	};
	switch (col.type) {
	case Type::Text:
		return Value::Text(s);
	case Type::Int64: {
		int64_t v;
		auto r = std::from_chars(s.data(), s.data() + s.size(), v);
		if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
			throw bad();
		}
		return Value::Int(v);
	}
	case Type::Float64: {
		double v;
		auto r = std::from_chars(s.data(), s.data() + s.size(), v);
		if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
			throw bad();
		}
		return Value::Float(v);
	}
	case Type::Bool: {
		std::string l = Lower(s);
		if (l == "true" || l == "t" || l == "1") {
			return Value::Bool(true);
		}
		if (l == "false" || l == "f" || l == "0") {
			return Value::Bool(false);
		}
		throw bad();
	}
	case Type::Date: {
		int32_t d;
		if (!ParseDate(s, d)) {
			throw bad();
		}
		return Value::Date(d);
	}
	default:
		throw bad();
	}
}

bool NeedsQuotes(const std::string &s) {
	if (s.empty() || s == "\\N") {
		return true;
	}
	return s.find_first_of(",\"\r\n") != std::string::npos;
}

void WriteField(std::ostream &out, const Value &v) {
	if (v.is_null()) {
		return;
	}
	if (v.type() != Type::Text) {
		out << v.ToString();
		return;
	}
	const std::string &s = v.as_text();
	if (!NeedsQuotes(s)) {
		out << s;
		return;
	}
	out << '"';
	for (char c : s) {
		if (c == '"') {
			out << '"';
		}
		out << c;
	}
	out << '"';
}

} // namespace

Relation ReadCsv(std::istream &in, const Schema &schema, const std::string &source) {
	size_t line = 1;
	std::vector<Cell> rec;
	if (!ReadRecord(in, rec, line)) {
		throw PacError(ErrorCode::DataError, source + ": missing header row");
	}
	// header names map to schema columns by name, in any order
	std::vector<int> target(rec.size(), -1);
	std::vector<bool> seen(schema.size(), false);
	for (size_t i = 0; i < rec.size(); i++) {
		int idx = schema.Find("", Lower(rec[i].text));
		if (idx < 0) {
			throw PacError(ErrorCode::DataError, source + ": header names unknown column '" + rec[i].text + "'");
		}
		if (seen[idx]) {
			throw PacError(ErrorCode::DataError, source + ": duplicate header column '" + rec[i].text + "'");
		}
		seen[idx] = true;
		target[i] = idx;
	}
	for (size_t i = 0; i < schema.size(); i++) {
		if (!seen[i]) {
			throw PacError(ErrorCode::DataError, source + ": header lacks column '" + schema[i].name + "'");
		}
	}
	Relation rel(schema);
	std::vector<Value> row(schema.size());
	while (true) {
		size_t rec_line = line;
		if (!ReadRecord(in, rec, line)) {
			break;
		}
		if (rec.size() == 1 && rec[0].text.empty() && !rec[0].quoted && schema.size() != 1) {
			continue; // blank line
		}
		if (rec.size() != target.size()) {
			throw PacError(ErrorCode::DataError, source + ": line " + std::to_string(rec_line) + " has " +
			                                         std::to_string(rec.size()) + " fields, expected " +
			                                         std::to_string(target.size()));
		}
		for (size_t i = 0; i < rec.size(); i++) {
			row[target[i]] = ParseCell(rec[i], schema[target[i]], rec_line);
		}
		rel.AppendRow(row);
	}
	return rel;
}

Relation ReadCsvFile(const std::string &path, const Schema &schema) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw PacError(ErrorCode::IoError, "cannot open " + path);
	}
	return ReadCsv(in, schema, path);
}

Relation ParseCsv(const std::string &text, const Schema &schema) {
	std::istringstream in(text);
	return ReadCsv(in, schema);
}

void WriteCsv(std::ostream &out, const Relation &rel, bool header) {
	if (header) {
		for (size_t i = 0; i < rel.schema.size(); i++) {
			out << (i ? "," : "") << rel.schema[i].name;
		}
		out << '\n';
	}
	size_t n = rel.rows();
	for (size_t r = 0; r < n; r++) {
		for (size_t i = 0; i < rel.cols.size(); i++) {
			if (i) {
				out << ',';
			}
			WriteField(out, rel.cols[i][r]);
		}
		out << '\n';
	}
}

std::string ToCsv(const Relation &rel, bool header) {
	std::ostringstream out;
	WriteCsv(out, rel, header);
	return out.str();
}

void WriteCsvFile(const std::string &path, const Relation &rel) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw PacError(ErrorCode::IoError, "cannot write " + path);
	}
	WriteCsv(out, rel);
}

} // namespace pac
