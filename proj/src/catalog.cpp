#include "pac/catalog.hpp"

#include "pac/errors.hpp"
#include "pac/lexer.hpp"

#include <algorithm>
#include <functional>

namespace pac {

const char *RejectReasonName(RejectReason r) {
	switch (r) {
	case RejectReason::ProtectedColumnRelease:
		return "ProtectedColumnRelease";
	case RejectReason::ProtectedGroupKey:
		return "ProtectedGroupKey";
	case RejectReason::NonLinkJoin:
		return "NonLinkJoin";
	case RejectReason::UnsupportedOperator:
		return "UnsupportedOperator";
	}
	return "?";
}

std::string Classification::ToString() const {
	switch (kind) {
	case Kind::Inconspicuous:
		return "Inconspicuous";
	case Kind::Rewritable:
		return "Rewritable";
	case Kind::Rejected:
		return std::string("Rejected(") + RejectReasonName(reason) + "): " + message;
	}
	return "?";
}

Type ParseTypeName(const std::string &n) {
	if (n == "integer" || n == "int" || n == "bigint" || n == "smallint" || n == "tinyint" || n == "hugeint" ||
	    n == "int64" || n == "int32" || n == "ubigint" || n == "uinteger") {
		return Type::Int64;
	}
	if (n == "double" || n == "float" || n == "real" || n == "decimal" || n == "numeric" || n == "float64") {
		return Type::Float64;
	}
	if (n == "varchar" || n == "char" || n == "text" || n == "string") {
		return Type::Text;
	}
	if (n == "date") {
		return Type::Date;
	}
	if (n == "boolean" || n == "bool") {
		return Type::Bool;
	}
	return Type::Null;
}

namespace {

std::vector<std::string> ColumnList(TokenStream &ts) {
	std::vector<std::string> out;
	ts.ExpectSym("(");
	do {
		out.push_back(ts.ExpectIdent("column name"));
	} while (ts.AcceptSym(","));
	ts.ExpectSym(")");
	return out;
}

void ParseCreate(TokenStream &ts, PrivacyCatalog &cat, std::vector<PacLink> &links) {
	ts.ExpectKw("create");
	TableDef def;
	def.is_pu = ts.AcceptKw("pu");
	ts.ExpectKw("table");
	def.name = ts.ExpectIdent("table name");
	ts.ExpectSym("(");
	std::vector<Column> cols;
	std::vector<PacLink> own_links;
	while (true) {
		if (ts.IsKw("pac_key")) {
			ts.Next();
			if (!def.pac_key.empty()) {
				ts.Fail("duplicate PAC_KEY");
			}
			def.pac_key = ColumnList(ts);
		} else if (ts.IsKw("protected")) {
			ts.Next();
			def.has_protected_clause = true;
			auto l = ColumnList(ts);
			def.declared_protected.insert(def.declared_protected.end(), l.begin(), l.end());
		} else if (ts.IsKw("pac_link")) {
			long at = ts.Peek().pos;
			ts.Next();
			PacLink link;
			link.from_table = def.name;
			link.local_columns = ColumnList(ts);
			ts.ExpectKw("references");
			link.to_table = ts.ExpectIdent("referenced table");
			link.referenced_columns = ColumnList(ts);
			if (link.local_columns.size() != link.referenced_columns.size()) {
				throw PacError(ErrorCode::ArityMismatch,
				               "PAC_LINK arity mismatch: " + std::to_string(link.local_columns.size()) + " local vs " +
				                   std::to_string(link.referenced_columns.size()) + " referenced columns",
				               at);
			}
			own_links.push_back(std::move(link));
		} else if (ts.IsKw("primary") && ts.IsKw("key", 1)) {
			ts.Next();
			ts.Next();
			ColumnList(ts);
		} else {
			Column c;
			c.name = ts.ExpectIdent("column name");
			c.qual = def.name;
			auto &tt = ts.Peek();
			if (tt.kind != Tok::Ident) {
				ts.Fail("expected a column type");
			}
			c.type = ParseTypeName(tt.text);
			if (c.type == Type::Null) {
				ts.Fail("unknown type");
			}
			ts.Next();
			if (ts.AcceptSym("(")) {
				// VARCHAR(n), DECIMAL(p,s): precision is ignored
				while (!ts.IsSym(")") && !ts.AtEnd()) {
					ts.Next();
				}
				ts.ExpectSym(")");
			}
			if (ts.AcceptKw("not")) {
				ts.ExpectKw("null");
				c.nullable = false;
			} else {
				ts.AcceptKw("null");
			}
			if (ts.IsKw("primary")) {
				ts.Next();
				ts.ExpectKw("key");
			}
			cols.push_back(std::move(c));
		}
		if (ts.AcceptSym(",")) {
			continue;
		}
		ts.ExpectSym(")");
		break;
	}
	def.schema = Schema(std::move(cols));
	cat.AddTable(std::move(def));
	for (auto &l : own_links) {
		links.push_back(std::move(l));
	}
}

} // namespace

void PrivacyCatalog::ParseDdl(std::string_view text) {
	TokenStream ts(text);
	std::vector<PacLink> pending;
	while (!ts.AtEnd()) {
		if (ts.AcceptSym(";")) {
			continue;
		}
		ParseCreate(ts, *this, pending);
		if (!ts.AtEnd()) {
			ts.ExpectSym(";");
		}
	}
	// links may name tables declared later in the same text
	for (auto &l : pending) {
		AddLink(std::move(l));
	}
	Validate();
}

void PrivacyCatalog::AddTable(TableDef def) {
	if (tables_.count(def.name)) {
		throw PacError(ErrorCode::SyntaxError, "table declared twice: " + def.name);
	}
	if (def.is_pu && !pu_table_.empty()) {
		throw PacError(ErrorCode::DuplicatePU, "a PU table is already declared (" + pu_table_ + "), cannot add " + def.name);
	}
	def.schema.CheckUnique();
	for (auto &c : def.schema.columns()) {
		if (c.name == "pu") {
			throw PacError(ErrorCode::SyntaxError, "column name 'pu' is reserved (table " + def.name + ")");
		}
	}
	auto need = [&](const std::vector<std::string> &cols, const char *clause) {
		for (auto &c : cols) {
			if (def.schema.Find("", c) < 0) {
				throw PacError(ErrorCode::UnknownColumn, std::string(clause) + " names unknown column " + def.name + "." + c);
			}
		}
	};
	need(def.pac_key, "PAC_KEY");
	need(def.declared_protected, "PROTECTED");
	if (def.is_pu) {
		if (def.pac_key.empty()) {
			throw PacError(ErrorCode::SyntaxError, "PU table " + def.name + " needs a PAC_KEY");
		}
		pu_table_ = def.name;
	}
	for (size_t i = 0; i < def.schema.size(); i++) {
		def.schema[i].qual = def.name;
	}
	tables_.emplace(def.name, std::move(def));
}

void PrivacyCatalog::AddLink(PacLink link) {
	if (link.local_columns.size() != link.referenced_columns.size() || link.local_columns.empty()) {
		throw PacError(ErrorCode::ArityMismatch, "PAC_LINK arity mismatch on " + link.from_table);
	}
	if (link.from_table == link.to_table) {
		throw PacError(ErrorCode::CyclicLink, "PAC_LINK of " + link.from_table + " references itself");
	}
	links_.push_back(std::move(link));
}

const TableDef &PrivacyCatalog::Table(const std::string &t) const {
	auto it = tables_.find(t);
	if (it == tables_.end()) {
		throw PacError(ErrorCode::UnknownTable, "unknown table: " + t);
	}
	return it->second;
}

const std::vector<std::string> &PrivacyCatalog::pac_key() const {
	return Table(pu_table_).pac_key;
}

void PrivacyCatalog::Validate() const {
	for (auto &l : links_) {
		auto &from = Table(l.from_table);
		auto it = tables_.find(l.to_table);
		if (it == tables_.end()) {
			throw PacError(ErrorCode::UnknownTable, "PAC_LINK of " + l.from_table + " references unknown table " + l.to_table);
		}
		for (auto &c : l.local_columns) {
			if (from.schema.Find("", c) < 0) {
				throw PacError(ErrorCode::UnknownColumn, "PAC_LINK names unknown column " + l.from_table + "." + c);
			}
		}
		for (auto &c : l.referenced_columns) {
			if (it->second.schema.Find("", c) < 0) {
				throw PacError(ErrorCode::UnknownColumn, "PAC_LINK references unknown column " + l.to_table + "." + c);
			}
		}
	}
	// cycle detection over the link graph (DFS colouring)
	std::map<std::string, int> colour;
	std::function<void(const std::string &)> dfs = [&](const std::string &t) {
		colour[t] = 1;
		for (auto &l : links_) {
			if (l.from_table != t) {
				continue;
			}
			int c = colour[l.to_table];
			if (c == 1) {
				throw PacError(ErrorCode::CyclicLink, "PAC links form a cycle through " + l.from_table + " -> " + l.to_table);
			}
			if (c == 0) {
				dfs(l.to_table);
			}
		}
		colour[t] = 2;
	};
	for (auto &[name, _] : tables_) {
		if (colour[name] == 0) {
			dfs(name);
		}
	}
	if (pu_table_.empty()) {
		return;
	}
	// at most one outgoing path toward the PU
	std::map<std::string, int> paths;
	std::function<int(const std::string &)> count = [&](const std::string &t) -> int {
		if (t == pu_table_) {
			return 1;
		}
		auto it = paths.find(t);
		if (it != paths.end()) {
			return it->second;
		}
		int n = 0;
		for (auto &l : links_) {
			if (l.from_table == t) {
				n += count(l.to_table);
			}
		}
		paths[t] = n;
		return n;
	};
	for (auto &[name, _] : tables_) {
		if (count(name) > 1) {
			throw PacError(ErrorCode::DiamondLink, "table " + name + " has more than one PAC_LINK path to " + pu_table_);
		}
	}
}

std::optional<std::vector<PacLink>> PrivacyCatalog::FkPath(const std::string &table) const {
	if (pu_table_.empty() || !tables_.count(table)) {
		return std::nullopt;
	}
	std::vector<PacLink> chain;
	std::string cur = table;
	std::set<std::string> seen;
	while (cur != pu_table_) {
		if (!seen.insert(cur).second) {
			return std::nullopt;
		}
		const PacLink *next = nullptr;
		for (auto &l : links_) {
			if (l.from_table == cur && FkPath(l.to_table).has_value()) {
				next = &l;
				break;
			}
		}
		if (!next) {
			return std::nullopt;
		}
		chain.push_back(*next);
		cur = next->to_table;
	}
	return chain;
}

bool PrivacyCatalog::IsProtected(const std::string &table, const std::string &column) const {
	auto it = tables_.find(table);
	if (it == tables_.end()) {
		return false;
	}
	auto &def = it->second;
	auto has = [&](const std::vector<std::string> &v) { return std::find(v.begin(), v.end(), column) != v.end(); };
	if (has(def.pac_key) || has(def.declared_protected)) {
		return true;
	}
	if (def.is_pu && !def.has_protected_clause) {
		return true;
	}
	for (auto &l : links_) {
		if (l.from_table == table && has(l.local_columns)) {
			return true;
		}
		if (l.to_table == table && has(l.referenced_columns)) {
			return true;
		}
	}
	return false;
}

std::set<std::pair<std::string, std::string>> PrivacyCatalog::ProtectedColumns() const {
	std::set<std::pair<std::string, std::string>> out;
	for (auto &[name, def] : tables_) {
		for (auto &c : def.schema.columns()) {
			if (IsProtected(name, c.name)) {
				out.insert({name, c.name});
			}
		}
	}
	return out;
}

std::string PrivacyCatalog::ToDdl() const {
	auto list = [](const std::vector<std::string> &v) {
		std::string s = "(";
		for (size_t i = 0; i < v.size(); i++) {
			s += (i ? ", " : "") + v[i];
		}
		return s + ")";
	};
	std::string out;
	for (auto &[name, def] : tables_) {
		out += def.is_pu ? "CREATE PU TABLE " : "CREATE TABLE ";
		out += name + " (\n";
		bool first = true;
		for (auto &c : def.schema.columns()) {
			out += first ? "    " : ",\n    ";
			first = false;
			out += c.name + " " + TypeName(c.type) + (c.nullable ? "" : " NOT NULL");
		}
		if (!def.pac_key.empty()) {
			out += ",\n    PAC_KEY " + list(def.pac_key);
		}
		if (def.has_protected_clause) {
			out += ",\n    PROTECTED " + list(def.declared_protected);
		}
		for (auto &l : links_) {
			if (l.from_table == name) {
				out += ",\n    PAC_LINK " + list(l.local_columns) + " REFERENCES " + l.to_table + " " +
				       list(l.referenced_columns);
			}
		}
		out += ");\n";
	}
	return out;
}

} // namespace pac
