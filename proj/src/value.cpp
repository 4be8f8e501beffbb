#include "pac/value.hpp"

#include "pac/errors.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_set>

namespace pac {

const char *ErrorCodeName(ErrorCode code) {
	switch (code) {
	case ErrorCode::SyntaxError:
		return "SyntaxError";
	case ErrorCode::UnsupportedSyntax:
		return "UnsupportedSyntax";
	case ErrorCode::UnknownColumn:
		return "UnknownColumn";
	case ErrorCode::UnknownTable:
		return "UnknownTable";
	case ErrorCode::TypeMismatch:
		return "TypeMismatch";
	case ErrorCode::DuplicatePU:
		return "DuplicatePU";
	case ErrorCode::CyclicLink:
		return "CyclicLink";
	case ErrorCode::ArityMismatch:
		return "ArityMismatch";
	case ErrorCode::DiamondLink:
		return "DiamondLink";
	case ErrorCode::NullKey:
		return "NullKey";
	case ErrorCode::SuspiciousGroup:
		return "SuspiciousGroup";
	case ErrorCode::KeyCollision:
		return "KeyCollision";
	case ErrorCode::OracleRefused:
		return "OracleRefused";
	case ErrorCode::DataError:
		return "DataError";
	case ErrorCode::IoError:
		return "IoError";
	case ErrorCode::Internal:
		return "Internal";
	}
	return "?";
}

const char *TypeName(Type t) {
	switch (t) {
	case Type::Null:
		return "NULL";
	case Type::Int64:
		return "BIGINT";
	case Type::Float64:
		return "DOUBLE";
	case Type::Bool:
		return "BOOLEAN";
	case Type::Text:
		return "VARCHAR";
	case Type::Date:
		return "DATE";
	case Type::Hash:
		return "HASH";
	case Type::Vector:
		return "VECTOR";
	}
	return "?";
}

bool IsNumeric(Type t) {
	return t == Type::Int64 || t == Type::Float64;
}

namespace {

struct InternPool {
	std::mutex mu;
	std::unordered_set<std::string> strings;
};

InternPool &Pool() {
	static InternPool pool;
	return pool;
}

// splitmix finalizer, reused for value hashing
inline uint64_t Mix(uint64_t x) {
	x ^= x >> 30;
	x *= 0xbf58476d1ce4e5b9ULL;
	x ^= x >> 27;
	x *= 0x94d049bb133111ebULL;
	x ^= x >> 31;
	return x;
}

using namespace std::chrono;

} // namespace

const std::string *Intern(std::string_view s) {
	auto &pool = Pool();
	std::lock_guard<std::mutex> guard(pool.mu);
	// node-based set: element addresses are stable
	return &*pool.strings.emplace(s).first;
}

double Value::to_double() const {
	switch (type()) {
	case Type::Int64:
		return static_cast<double>(as_int());
	case Type::Float64:
		return as_float();
	case Type::Bool:
		return as_bool() ? 1.0 : 0.0;
	case Type::Date:
		return static_cast<double>(as_date());
	default:
		throw PacError(ErrorCode::TypeMismatch, std::string("not numeric: ") + TypeName(type()));
	}
}

std::string FormatDouble(double d) {
	if (std::isnan(d)) {
		return "nan";
	}
	if (std::isinf(d)) {
		return d > 0 ? "inf" : "-inf";
	}
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof(buf), d);
	return std::string(buf, res.ptr);
}

std::string Value::ToString() const {
	switch (type()) {
	case Type::Null:
		return "NULL";
	case Type::Int64:
		return std::to_string(as_int());
	case Type::Float64:
		return FormatDouble(as_float());
	case Type::Bool:
		return as_bool() ? "true" : "false";
	case Type::Text:
		return as_text();
	case Type::Date:
		return FormatDate(as_date());
	case Type::Hash: {
		char buf[19] = "0x";
		auto res = std::to_chars(buf + 2, buf + sizeof(buf), as_hash(), 16);
		return std::string(buf, res.ptr);
	}
	case Type::Vector: {
		auto &v = *as_vector();
		std::string out = "[";
		for (int j = 0; j < 64; j++) {
			if (j) {
				out += ",";
			}
			out += v.Has(j) ? FormatDouble(v.values[j]) : "_";
		}
		return out + "]";
	}
	}
	return "?";
}

int Compare(const Value &a, const Value &b) {
	Type ta = a.type(), tb = b.type();
	if (ta == Type::Null || tb == Type::Null) {
		return (ta == Type::Null ? 0 : 1) - (tb == Type::Null ? 0 : 1);
	}
	if (ta == Type::Int64 && tb == Type::Int64) {
		return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
	}
	if (IsNumeric(ta) && IsNumeric(tb)) {
		double x = a.to_double(), y = b.to_double();
		return x < y ? -1 : (x > y ? 1 : 0);
	}
	if (ta != tb) {
		return ta < tb ? -1 : 1;
	}
	switch (ta) {
	case Type::Bool:
		return int(a.as_bool()) - int(b.as_bool());
	case Type::Text:
		if (a.text_ptr() == b.text_ptr()) {
			return 0;
		}
		return a.as_text().compare(b.as_text()) < 0 ? -1 : 1;
	case Type::Date:
		return a.as_date() < b.as_date() ? -1 : (a.as_date() > b.as_date() ? 1 : 0);
	case Type::Hash:
		return a.as_hash() < b.as_hash() ? -1 : (a.as_hash() > b.as_hash() ? 1 : 0);
	case Type::Vector: {
		auto &x = *a.as_vector(), &y = *b.as_vector();
		if (x.mask != y.mask) {
			return x.mask < y.mask ? -1 : 1;
		}
		for (int j = 0; j < 64; j++) {
			if (x.values[j] != y.values[j]) {
				return x.values[j] < y.values[j] ? -1 : 1;
			}
		}
		return 0;
	}
	default:
		return 0;
	}
}

bool Equal(const Value &a, const Value &b) {
	if (a.type() == Type::Text && b.type() == Type::Text) {
		return a.text_ptr() == b.text_ptr();
	}
	return Compare(a, b) == 0;
}

uint64_t HashValue(const Value &v) {
	switch (v.type()) {
	case Type::Null:
		return 0x9e3779b97f4a7c15ULL;
	case Type::Int64:
		return Mix(static_cast<uint64_t>(v.as_int()));
	case Type::Float64: {
		double d = v.as_float();
		if (d == std::floor(d) && std::fabs(d) < 9.2e18) {
			return Mix(static_cast<uint64_t>(static_cast<int64_t>(d)));
		}
		uint64_t bits;
		std::memcpy(&bits, &d, sizeof(bits));
		return Mix(bits);
	}
	case Type::Bool:
		return Mix(v.as_bool() ? 0x51ULL : 0x50ULL);
	case Type::Text:
		return Mix(reinterpret_cast<uintptr_t>(v.text_ptr()));
	case Type::Date:
		return Mix(0xd000000000000000ULL ^ static_cast<uint32_t>(v.as_date()));
	case Type::Hash:
		return Mix(v.as_hash() ^ 0x4841534800000000ULL);
	case Type::Vector: {
		auto &x = *v.as_vector();
		uint64_t h = Mix(x.mask);
		for (double d : x.values) {
			uint64_t bits;
			std::memcpy(&bits, &d, sizeof(bits));
			h = Mix(h ^ bits);
		}
		return h;
	}
	}
	return 0;
}

bool ParseDate(std::string_view s, int32_t &days) {
	if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
		return false;
	}
	int y = 0, m = 0, d = 0;
	auto p1 = std::from_chars(s.data(), s.data() + 4, y);
	auto p2 = std::from_chars(s.data() + 5, s.data() + 7, m);
	auto p3 = std::from_chars(s.data() + 8, s.data() + 10, d);
	if (p1.ec != std::errc() || p2.ec != std::errc() || p3.ec != std::errc() || p1.ptr != s.data() + 4 ||
	    p2.ptr != s.data() + 7 || p3.ptr != s.data() + 10) {
		return false;
	}
	year_month_day ymd {year(y), month(unsigned(m)), day(unsigned(d))};
	if (!ymd.ok()) {
		return false;
	}
	days = static_cast<int32_t>(sys_days(ymd).time_since_epoch().count());
	return true;
}

std::string FormatDate(int32_t days) {
	year_month_day ymd {sys_days(std::chrono::days(days))};
	char buf[16];
	int y = int(ymd.year());
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, unsigned(ymd.month()), unsigned(ymd.day()));
	return buf;
}

int32_t DateYear(int32_t days) {
	year_month_day ymd {sys_days(std::chrono::days(days))};
	return int(ymd.year());
}

Value Cast(const Value &v, Type to) {
	if (v.is_null() || v.type() == to) {
		return v;
	}
	switch (to) {
	case Type::Int64:
		switch (v.type()) {
		case Type::Float64:
			return Value::Int(static_cast<int64_t>(std::trunc(v.as_float())));
		case Type::Bool:
			return Value::Int(v.as_bool() ? 1 : 0);
		case Type::Date:
			return Value::Int(v.as_date());
		case Type::Text: {
			int64_t x;
			auto &s = v.as_text();
			auto r = std::from_chars(s.data(), s.data() + s.size(), x);
			if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
				return Value::Null();
			}
			return Value::Int(x);
		}
		default:
			break;
		}
		break;
	case Type::Float64:
		switch (v.type()) {
		case Type::Int64:
		case Type::Bool:
		case Type::Date:
			return Value::Float(v.to_double());
		case Type::Text: {
			double x;
			auto &s = v.as_text();
			auto r = std::from_chars(s.data(), s.data() + s.size(), x);
			if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
				return Value::Null();
			}
			return Value::Float(x);
		}
		default:
			break;
		}
		break;
	case Type::Bool:
		if (IsNumeric(v.type())) {
			return Value::Bool(v.to_double() != 0.0);
		}
		break;
	case Type::Text:
		return Value::Text(v.ToString());
	case Type::Date:
		if (v.type() == Type::Text) {
			int32_t d;
			return ParseDate(v.as_text(), d) ? Value::Date(d) : Value::Null();
		}
		if (v.type() == Type::Int64) {
			return Value::Date(static_cast<int32_t>(v.as_int()));
		}
		break;
	default:
		break;
	}
	throw PacError(ErrorCode::TypeMismatch,
	               std::string("cannot cast ") + TypeName(v.type()) + " to " + TypeName(to));
}

std::string Lower(std::string_view s) {
	std::string out(s);
	for (auto &c : out) {
		if (c >= 'A' && c <= 'Z') {
			c = char(c - 'A' + 'a');
		}
	}
	return out;
}

Schema::Schema(std::vector<Column> cols) : cols_(std::move(cols)) {
}

int Schema::Find(std::string_view qual, std::string_view name) const {
	int found = -1;
	for (size_t i = 0; i < cols_.size(); i++) {
		if (cols_[i].name != name) {
			continue;
		}
		if (!qual.empty() && cols_[i].qual != qual) {
			continue;
		}
		if (found >= 0) {
			throw PacError(ErrorCode::UnknownColumn, "ambiguous column reference: " + std::string(name));
		}
		found = int(i);
	}
	return found;
}

void Schema::CheckUnique() const {
	std::unordered_set<std::string> seen;
	for (auto &c : cols_) {
		if (!seen.insert(Lower(c.name)).second) {
			throw PacError(ErrorCode::SyntaxError, "duplicate column name: " + c.name);
		}
	}
}

void Relation::AppendRow(const std::vector<Value> &row) {
	for (size_t i = 0; i < cols.size(); i++) {
		cols[i].push_back(row[i]);
	}
}

std::vector<Value> Relation::Row(size_t r) const {
	std::vector<Value> out;
	out.reserve(cols.size());
	for (auto &c : cols) {
		out.push_back(c[r]);
	}
	return out;
}

void Relation::Validate() const {
	size_t n = rows();
	for (size_t i = 0; i < cols.size(); i++) {
		if (cols[i].size() != n) {
			throw PacError(ErrorCode::Internal, "ragged relation at column " + schema[i].name);
		}
		auto &c = schema[i];
		for (auto &v : cols[i]) {
			if (v.is_null()) {
				if (!c.nullable) {
					throw PacError(ErrorCode::DataError, "NULL in NOT NULL column " + c.name);
				}
				continue;
			}
			Type want = c.lifted ? Type::Vector : c.type;
			if (v.type() != want) {
				throw PacError(ErrorCode::DataError, "column " + c.name + " holds " + TypeName(v.type()) +
				                                         ", declared " + TypeName(want));
			}
		}
	}
}

} // namespace pac
