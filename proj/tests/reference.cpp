#include "reference.hpp"

#include "pac/errors.hpp"

#include <algorithm>
#include <map>

using namespace pac;

namespace pactest {

namespace {

using Row = std::vector<Value>;

struct Table {
	Schema schema;
	std::vector<Row> rows;
};

struct RowLess {
	bool operator()(const Row &a, const Row &b) const {
		for (size_t i = 0; i < a.size(); i++) {
			int c = Compare(a[i], b[i]);
			if (c) {
				return c < 0;
			}
		}
		return false;
	}
};

Relation ToRelation(const Table &t) {
	Relation r(t.schema);
	for (auto &row : t.rows) {
		r.AppendRow(row);
	}
	return r;
}

class Interp : public EvalHooks {
public:
	explicit Interp(const Database &db) : db_(db) {
	}

	uint64_t Salt() override {
		throw PacError(ErrorCode::Internal, "reference interpreter has no salt");
	}
	bool PacFilter(uint64_t) override {
		throw PacError(ErrorCode::Internal, "reference interpreter cannot draw");
	}
	Value PacNoised(const WorldVector &, double) override {
		throw PacError(ErrorCode::Internal, "reference interpreter cannot draw");
	}
	Value ScalarSubquery(const PlanNode *plan) override {
		Table t = Run(PlanPtr(PlanPtr(), const_cast<PlanNode *>(plan)));
		return t.rows.empty() ? Value::Null() : t.rows[0][0];
	}

	// evaluate on a single row by wrapping it in a one-row relation
	Value On(const ExprPtr &bound, const Schema &s, const Row &row) {
		Relation r(s);
		r.AppendRow(row);
		RowCtx ctx {&r, 0, -1, this};
		return Eval(*bound, ctx);
	}

	Table Run(const PlanPtr &n) {
		switch (n->kind) {
		case PlanKind::Scan: {
			const Relation &rel = db_.Get(n->table);
			Table t;
			t.schema = rel.schema;
			for (size_t i = 0; i < t.schema.size(); i++) {
				t.schema[i].qual = n->alias.empty() ? n->table : n->alias;
			}
			for (size_t r = 0; r < rel.rows(); r++) {
				t.rows.push_back(rel.Row(r));
			}
			return t;
		}
		case PlanKind::CteRef: {
			for (auto it = ctes_.rbegin(); it != ctes_.rend(); ++it) {
				auto f = it->find(n->table);
				if (f != it->end()) {
					Table t = f->second;
					for (size_t i = 0; i < t.schema.size(); i++) {
						t.schema[i].qual = n->alias.empty() ? n->table : n->alias;
					}
					return t;
				}
			}
			throw PacError(ErrorCode::UnknownTable, n->table);
		}
		case PlanKind::Values: {
			Table t;
			t.schema = DeriveNodeSchema(*n, {});
			t.rows.push_back({Value::Int(1)});
			return t;
		}
		case PlanKind::With: {
			ctes_.emplace_back();
			for (size_t i = 0; i < n->cte_names.size(); i++) {
				ctes_.back()[n->cte_names[i]] = Run(n->children[i]);
			}
			Table t = Run(n->children.back());
			ctes_.pop_back();
			return t;
		}
		case PlanKind::Filter: {
			Table in = Run(n->children[0]);
			auto p = Bind(n->pred, in.schema);
			Table out {in.schema, {}};
			for (auto &row : in.rows) {
				if (IsTrue(On(p, in.schema, row))) {
					out.rows.push_back(row);
				}
			}
			return out;
		}
		case PlanKind::Project: {
			Table in = Run(n->children[0]);
			Table out;
			out.schema = DeriveNodeSchema(*n, {&in.schema});
			std::vector<ExprPtr> es;
			for (auto &e : n->exprs) {
				es.push_back(Bind(e, in.schema));
			}
			for (auto &row : in.rows) {
				Row o;
				for (auto &e : es) {
					o.push_back(On(e, in.schema, row));
				}
				out.rows.push_back(o);
			}
			return out;
		}
		case PlanKind::Join: {
			Table l = Run(n->children[0]);
			Table r = Run(n->children[1]);
			Table out;
			out.schema = DeriveNodeSchema(*n, {&l.schema, &r.schema});
			// the whole condition as one predicate over the concatenated row
			std::vector<ExprPtr> conj;
			for (size_t i = 0; i < n->lkeys.size(); i++) {
				conj.push_back(MakeBinary(BinOp::Eq, n->lkeys[i], n->rkeys[i]));
			}
			if (n->residual) {
				conj.push_back(n->residual);
			}
			ExprPtr cond = conj.empty() ? nullptr : Bind(JoinConjuncts(conj), out.schema);
			for (auto &a : l.rows) {
				bool any = false;
				for (auto &b : r.rows) {
					Row row = a;
					row.insert(row.end(), b.begin(), b.end());
					if (!cond || IsTrue(On(cond, out.schema, row))) {
						out.rows.push_back(row);
						any = true;
					}
				}
				if (!any && n->join == JoinKind::Left) {
					Row row = a;
					row.resize(a.size() + r.schema.size());
					out.rows.push_back(row);
				}
			}
			return out;
		}
		case PlanKind::Aggregate: {
			Table in = Run(n->children[0]);
			Table out;
			out.schema = DeriveNodeSchema(*n, {&in.schema});
			std::vector<ExprPtr> gs, as;
			for (auto &g : n->groups) {
				gs.push_back(Bind(g, in.schema));
			}
			for (auto &a : n->aggs) {
				as.push_back(a.arg ? Bind(a.arg, in.schema) : nullptr);
			}
			std::map<Row, std::vector<Row>, RowLess> groups;
			if (gs.empty()) {
				groups[Row {}];
			}
			for (auto &row : in.rows) {
				Row k;
				for (auto &g : gs) {
					k.push_back(On(g, in.schema, row));
				}
				groups[k].push_back(row);
			}
			for (auto &[k, rows] : groups) {
				Row o = k;
				for (size_t i = 0; i < n->aggs.size(); i++) {
					std::vector<Value> vals;
					for (auto &row : rows) {
						vals.push_back(as[i] ? On(as[i], in.schema, row) : Value::Int(1));
					}
					o.push_back(Fold(n->aggs[i].kind, as[i] ? as[i]->type : Type::Int64, vals));
				}
				out.rows.push_back(o);
			}
			return out;
		}
		case PlanKind::Sort: {
			Table in = Run(n->children[0]);
			std::vector<ExprPtr> ks;
			for (auto &k : n->sort) {
				ks.push_back(Bind(k.expr, in.schema));
			}
			std::vector<std::pair<Row, Row>> keyed;
			for (auto &row : in.rows) {
				Row k;
				for (auto &e : ks) {
					k.push_back(On(e, in.schema, row));
				}
				keyed.emplace_back(k, row);
			}
			std::stable_sort(keyed.begin(), keyed.end(), [&](auto &a, auto &b) {
				for (size_t i = 0; i < ks.size(); i++) {
					int c = Compare(a.first[i], b.first[i]);
					if (c) {
						return n->sort[i].desc ? c > 0 : c < 0;
					}
				}
				return false;
			});
			Table out {in.schema, {}};
			for (auto &kr : keyed) {
				out.rows.push_back(kr.second);
			}
			return out;
		}
		case PlanKind::Limit: {
			Table in = Run(n->children[0]);
			if (n->limit >= 0 && in.rows.size() > size_t(n->limit)) {
				in.rows.resize(size_t(n->limit));
			}
			return in;
		}
		case PlanKind::SetOp: {
			Table a = Run(n->children[0]);
			Table b = Run(n->children[1]);
			if (Lower(n->note) != "union all") {
				throw PacError(ErrorCode::UnsupportedSyntax, "reference handles UNION ALL only");
			}
			a.rows.insert(a.rows.end(), b.rows.begin(), b.rows.end());
			return a;
		}
		default:
			throw PacError(ErrorCode::UnsupportedSyntax, "reference interpreter: unsupported node");
		}
	}

private:
	static Value Fold(AggKind k, Type t, const std::vector<Value> &vals) {
		std::vector<Value> nn;
		for (auto &v : vals) {
			if (!v.is_null()) {
				nn.push_back(v);
			}
		}
		switch (k) {
		case AggKind::CountStar:
			return Value::Int(int64_t(vals.size()));
		case AggKind::Count:
			return Value::Int(int64_t(nn.size()));
		case AggKind::Sum:
		case AggKind::Avg: {
			if (nn.empty()) {
				return Value::Null();
			}
			if (t == Type::Int64) {
				int64_t is = 0;
				for (auto &v : nn) {
					is += v.as_int();
				}
				return k == AggKind::Sum ? Value::Int(is) : Value::Float(double(is) / double(nn.size()));
			}
			double s = 0;
			for (auto &v : nn) {
				s += v.to_double();
			}
			return k == AggKind::Sum ? Value::Float(s) : Value::Float(s / double(nn.size()));
		}
		case AggKind::Min:
		case AggKind::Max: {
			if (nn.empty()) {
				return Value::Null();
			}
			Value best = nn[0];
			for (auto &v : nn) {
				int c = Compare(v, best);
				if ((k == AggKind::Min && c < 0) || (k == AggKind::Max && c > 0)) {
					best = v;
				}
			}
			return best;
		}
		}
		return Value::Null();
	}

	const Database &db_;
	std::vector<std::map<std::string, Table>> ctes_;
};

} // namespace

Relation ReferenceRun(const PlanPtr &normalized, const Database &db) {
	Interp in(db);
	return ToRelation(in.Run(normalized));
}

} // namespace pactest
