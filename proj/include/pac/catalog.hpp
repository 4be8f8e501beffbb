//
// Privacy metadata: the PU table, PAC keys, protected columns and PAC links,
// plus the query classification verdict.
//

#ifndef PAC_CATALOG_HPP
#define PAC_CATALOG_HPP

#include "pac/value.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pac {

struct PacLink {
	std::string from_table;
	std::vector<std::string> local_columns;
	std::string to_table;
	std::vector<std::string> referenced_columns;

	bool operator==(const PacLink &o) const {
		return from_table == o.from_table && local_columns == o.local_columns && to_table == o.to_table &&
		       referenced_columns == o.referenced_columns;
	}
};

struct TableDef {
	std::string name;
	Schema schema;
	bool is_pu = false;
	std::vector<std::string> pac_key;
	// explicit PROTECTED(...) list, empty when absent
	std::vector<std::string> declared_protected;
	bool has_protected_clause = false;
};

class PrivacyCatalog {
public:
	// parses and applies every statement; validates the link graph at the end
	void ParseDdl(std::string_view text);

	// programmatic equivalents (validate on the spot)
	void AddTable(TableDef def);
	void AddLink(PacLink link);
	void Validate() const;

	bool HasTable(const std::string &t) const {
		return tables_.count(t) != 0;
	}
	const TableDef &Table(const std::string &t) const;
	const std::map<std::string, TableDef> &tables() const {
		return tables_;
	}
	const std::string &pu_table() const {
		return pu_table_;
	}
	const std::vector<std::string> &pac_key() const;
	const std::vector<PacLink> &links() const {
		return links_;
	}

	// chain of links from `table` to the PU table: empty for the PU itself, nullopt when unlinked
	std::optional<std::vector<PacLink>> FkPath(const std::string &table) const;
	bool IsLinked(const std::string &table) const {
		return FkPath(table).has_value();
	}
	bool IsProtected(const std::string &table, const std::string &column) const;
	std::set<std::pair<std::string, std::string>> ProtectedColumns() const;

	// canonical DDL text (round-trips through ParseDdl)
	std::string ToDdl() const;

private:
	std::map<std::string, TableDef> tables_;
	std::vector<PacLink> links_;
	std::string pu_table_;
};

enum class RejectReason : uint8_t { ProtectedColumnRelease, ProtectedGroupKey, NonLinkJoin, UnsupportedOperator };
const char *RejectReasonName(RejectReason r);

struct Classification {
	enum class Kind : uint8_t { Inconspicuous, Rejected, Rewritable };
	Kind kind = Kind::Inconspicuous;
	RejectReason reason = RejectReason::UnsupportedOperator;
	std::string message;

	static Classification Inconspicuous() {
		return {};
	}
	static Classification Rewritable() {
		Classification c;
		c.kind = Kind::Rewritable;
		return c;
	}
	static Classification Rejected(RejectReason r, std::string msg) {
		Classification c;
		c.kind = Kind::Rejected;
		c.reason = r;
		c.message = std::move(msg);
		return c;
	}
	std::string ToString() const;
};

Type ParseTypeName(const std::string &name);

} // namespace pac

#endif // PAC_CATALOG_HPP
