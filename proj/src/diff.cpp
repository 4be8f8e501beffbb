#include "executor.hpp"

#include "pac/errors.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <unordered_map>

namespace pac {

namespace {

using KeyIndex = std::unordered_map<std::vector<Value>, size_t, KeyHash, KeyEq>;

std::vector<Value> KeyOf(const Relation &rel, size_t r, size_t n) {
	std::vector<Value> k(n);
	for (size_t i = 0; i < n; i++) {
		k[i] = rel.cols[i][r];
	}
	return k;
}

KeyIndex IndexRows(const Relation &rel, size_t n, const char *side) {
	KeyIndex idx;
	for (size_t r = 0; r < rel.rows(); r++) {
		if (!idx.emplace(KeyOf(rel, r, n), r).second) {
			throw PacError(ErrorCode::KeyCollision,
			               std::string("first ") + std::to_string(n) + " columns are not unique in the " + side + " result");
		}
	}
	return idx;
}

double Ratio(size_t a, size_t b) {
	return b == 0 ? 1.0 : double(a) / double(b);
}

} // namespace

DiffReport CompareResults(const Relation &exact, const Relation &priv, size_t key_cols) {
	if (key_cols > exact.schema.size() || key_cols > priv.schema.size()) {
		throw PacError(ErrorCode::ArityMismatch, "key column count exceeds the result width");
	}
	KeyIndex ei = IndexRows(exact, key_cols, "exact");
	KeyIndex pi = IndexRows(priv, key_cols, "private");
	DiffReport rep;
	double err = 0.0;
	size_t width = std::min(exact.schema.size(), priv.schema.size());
	for (size_t r = 0; r < exact.rows(); r++) {
		auto key = KeyOf(exact, r, key_cols);
		auto it = pi.find(key);
		if (it == pi.end()) {
			rep.missing++;
			rep.rows.push_back({DiffClass::Missing, std::move(key)});
			continue;
		}
		rep.matched++;
		for (size_t c = key_cols; c < width; c++) {
			const Value &e = exact.cols[c][r];
			if (e.is_null() || !IsNumeric(e.type())) {
				continue;
			}
			double x = e.to_double();
			if (x == 0.0) {
				continue;
			}
			const Value &p = priv.cols[c][it->second];
			// a suppressed cell counts as a total miss
			err += p.is_null() ? 1.0 : std::fabs(p.to_double() - x) / std::fabs(x);
			rep.mape_cells++;
		}
		rep.rows.push_back({DiffClass::Match, std::move(key)});
	}
	for (size_t r = 0; r < priv.rows(); r++) {
		auto key = KeyOf(priv, r, key_cols);
		if (!ei.count(key)) {
			rep.spurious++;
			rep.rows.push_back({DiffClass::Spurious, std::move(key)});
		}
	}
	rep.mape = rep.mape_cells ? err / double(rep.mape_cells) : 0.0;
	rep.recall = Ratio(rep.matched, rep.matched + rep.missing);
	rep.precision = Ratio(rep.matched, rep.matched + rep.spurious);
	return rep;
}

DiffReport PacDiff(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg,
                   size_t key_cols) {
	QueryOutcome priv = RunQuery(sql, catalog, db, cfg);
	if (priv.analysis.cls.kind != Classification::Kind::Rewritable) {
		throw PacError(ErrorCode::OracleRefused, "PacDiff needs a rewritable query (" + priv.analysis.cls.ToString() + ")");
	}
	return CompareResults(RunExact(sql, catalog, db), priv.result, key_cols);
}

std::string DiffReport::ToText() const {
	std::ostringstream out;
	for (auto &r : rows) {
		out << char(r.cls);
		for (auto &v : r.key) {
			out << ' ' << v.ToString();
		}
		out << '\n';
	}
	char buf[256];
	std::snprintf(buf, sizeof buf, "%-8s %-8s %-8s %-10s %-10s %s\n", "matched", "missing", "spurious", "precision",
	              "recall", "mape");
	out << buf;
	std::snprintf(buf, sizeof buf, "%-8zu %-8zu %-8zu %-10.6f %-10.6f %.6f\n", matched, missing, spurious, precision,
	              recall, mape);
	out << buf;
	return out.str();
}

std::string DiffReport::ToJson() const {
	nlohmann::json j;
	j["mape"] = mape;
	j["precision"] = precision;
	j["recall"] = recall;
	j["matched"] = matched;
	j["missing"] = missing;
	j["spurious"] = spurious;
	j["mape_cells"] = mape_cells;
	auto rows_j = nlohmann::json::array();
	for (auto &r : rows) {
		nlohmann::json k = nlohmann::json::array();
		for (auto &v : r.key) {
			k.push_back(v.ToString());
		}
		rows_j.push_back({{"class", std::string(1, char(r.cls))}, {"key", k}});
	}
	j["rows"] = rows_j;
	return j.dump(2);
}

} // namespace pac
