//
// Scalar values, schemas and columnar relations.
//

#ifndef PAC_VALUE_HPP
#define PAC_VALUE_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pac {

enum class Type : uint8_t { Null, Int64, Float64, Bool, Text, Date, Hash, Vector };

const char *TypeName(Type t);
bool IsNumeric(Type t);

// 64 per-world values plus the presence mask (bit j set <=> world j saw input)
struct WorldVector {
	std::array<double, 64> values{};
	uint64_t mask = 0;

	bool Has(int j) const {
		return (mask >> j) & 1ULL;
	}
	// unset slots read as zero
	double At(int j) const {
		return Has(j) ? values[j] : 0.0;
	}
	bool operator==(const WorldVector &o) const {
		return mask == o.mask && values == o.values;
	}
};
using VecPtr = std::shared_ptr<const WorldVector>;

// strings are interned so Text values stay trivially copyable and compare by pointer
struct TextV {
	const std::string *s;
};
struct DateV {
	int32_t days;
};
struct HashV {
	uint64_t bits;
};

const std::string *Intern(std::string_view s);

class Value {
public:
	using Repr = std::variant<std::monostate, int64_t, double, bool, TextV, DateV, HashV, VecPtr>;

	Value() = default;
	static Value Null() {
		return Value();
	}
	static Value Int(int64_t v) {
		return Value(Repr(v));
	}
	static Value Float(double v) {
		return Value(Repr(v));
	}
	static Value Bool(bool v) {
		return Value(Repr(v));
	}
	static Value Text(std::string_view s) {
		return Value(Repr(TextV {Intern(s)}));
	}
	static Value Date(int32_t days) {
		return Value(Repr(DateV {days}));
	}
	static Value Hash(uint64_t bits) {
		return Value(Repr(HashV {bits}));
	}
	static Value Vector(VecPtr v) {
		return Value(Repr(std::move(v)));
	}

	Type type() const {
		return static_cast<Type>(repr_.index());
	}
	bool is_null() const {
		return repr_.index() == 0;
	}
	int64_t as_int() const {
		return std::get<int64_t>(repr_);
	}
	double as_float() const {
		return std::get<double>(repr_);
	}
	bool as_bool() const {
		return std::get<bool>(repr_);
	}
	const std::string &as_text() const {
		return *std::get<TextV>(repr_).s;
	}
	const std::string *text_ptr() const {
		return std::get<TextV>(repr_).s;
	}
	int32_t as_date() const {
		return std::get<DateV>(repr_).days;
	}
	uint64_t as_hash() const {
		return std::get<HashV>(repr_).bits;
	}
	const VecPtr &as_vector() const {
		return std::get<VecPtr>(repr_);
	}
	// Int64, Float64, Date and Bool widen to double
	double to_double() const;

	const Repr &repr() const {
		return repr_;
	}

	std::string ToString() const;

private:
	explicit Value(Repr r) : repr_(std::move(r)) {
	}
	Repr repr_;
};

// total order: Null first, numerics compared across Int64/Float64
int Compare(const Value &a, const Value &b);
bool Equal(const Value &a, const Value &b);
// hash consistent with Equal (Int64 2 and Float64 2.0 collide on purpose)
uint64_t HashValue(const Value &v);

// ISO-8601 helpers, days since 1970-01-01
bool ParseDate(std::string_view s, int32_t &days);
std::string FormatDate(int32_t days);
int32_t DateYear(int32_t days);

// shortest round-trip rendering
std::string FormatDouble(double d);

Value Cast(const Value &v, Type to);

struct Column {
	std::string name;
	std::string qual;
	Type type = Type::Null;
	bool nullable = true;
	// column holds WorldVectors whose slots are of `type`
	bool lifted = false;
};

class Schema {
public:
	Schema() = default;
	explicit Schema(std::vector<Column> cols);

	size_t size() const {
		return cols_.size();
	}
	const Column &operator[](size_t i) const {
		return cols_[i];
	}
	Column &operator[](size_t i) {
		return cols_[i];
	}
	const std::vector<Column> &columns() const {
		return cols_;
	}
	void Add(Column c) {
		cols_.push_back(std::move(c));
	}
	// -1 when absent; throws UnknownColumn on ambiguity
	int Find(std::string_view qual, std::string_view name) const;
	// names must be unique (case-insensitive) for declared table schemas
	void CheckUnique() const;

private:
	std::vector<Column> cols_;
};

struct Relation {
	Schema schema;
	std::vector<std::vector<Value>> cols;

	Relation() = default;
	explicit Relation(Schema s) : schema(std::move(s)), cols(schema.size()) {
	}
	size_t rows() const {
		return cols.empty() ? 0 : cols[0].size();
	}
	void AppendRow(const std::vector<Value> &row);
	std::vector<Value> Row(size_t r) const;
	// types and nullability conform to the schema
	void Validate() const;
};

std::string Lower(std::string_view s);

} // namespace pac

#endif // PAC_VALUE_HPP
