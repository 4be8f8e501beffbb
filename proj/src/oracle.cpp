#include "executor.hpp"

#include "pac/errors.hpp"
#include "pac/hash.hpp"

#include <functional>
#include <unordered_map>

namespace pac {

std::map<std::string, std::vector<uint64_t>> WorldMembership(const PrivacyCatalog &catalog, const Database &db,
                                                             uint64_t salt) {
	std::map<std::string, std::vector<uint64_t>> out;
	auto column_values = [&](const Relation &rel, const std::vector<std::string> &names, size_t r) {
		std::vector<Value> key;
		for (auto &nm : names) {
			int c = rel.schema.Find("", nm);
			if (c < 0) {
				throw PacError(ErrorCode::UnknownColumn, "missing link column " + nm);
			}
			key.push_back(rel.cols[c][r]);
		}
		return key;
	};
	std::function<const std::vector<uint64_t> &(const std::string &)> of = [&](const std::string &t)
	    -> const std::vector<uint64_t> & {
		auto done = out.find(t);
		if (done != out.end()) {
			return done->second;
		}
		const Relation &rel = db.Get(t);
		auto path = catalog.FkPath(t);
		std::vector<uint64_t> m(rel.rows(), 0);
		if (path->size() <= 1) {
			// the PU key, or a direct reference to it: hashed as stored
			const auto &cols = path->empty() ? catalog.pac_key() : (*path)[0].local_columns;
			for (size_t r = 0; r < rel.rows(); r++) {
				m[r] = PacHash(column_values(rel, cols, r), salt);
			}
		} else {
			const PacLink &l = (*path)[0];
			const auto &parent = of(l.to_table);
			const Relation &prel = db.Get(l.to_table);
			std::unordered_map<std::vector<Value>, size_t, KeyHash, KeyEq> index;
			for (size_t r = 0; r < prel.rows(); r++) {
				index.try_emplace(column_values(prel, l.referenced_columns, r), r);
			}
			for (size_t r = 0; r < rel.rows(); r++) {
				auto key = column_values(rel, l.local_columns, r);
				bool null = false;
				for (auto &v : key) {
					null |= v.is_null();
				}
				if (null) {
					continue;
				}
				auto it = index.find(key);
				if (it != index.end()) {
					m[r] = parent[it->second];
				}
			}
		}
		return out.emplace(t, std::move(m)).first->second;
	};
	for (auto &[name, def] : catalog.tables()) {
		if (catalog.IsLinked(name) && db.Has(name)) {
			of(name);
		}
	}
	return out;
}

Oracle::Oracle(const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg, const Analysis &an,
               NoiseSession &session)
    : db_(db), cfg_(cfg), an_(an), session_(session) {
	member_ = WorldMembership(catalog, db, session.salt());
}

Relation Oracle::Run(const PlanPtr &normalized) {
	Executor ex(db_, cfg_, session_);
	ex.oracle = this;
	ex.ctes = &ctes_;
	return ex.Run(normalized).Materialize();
}

namespace {

bool RefsFrom(const ExprPtr &e, size_t first) {
	bool found = false;
	VisitExpr(e, [&](const ExprPtr &x) { found |= x->kind == ExprKind::Column && x->index >= long(first); });
	return found;
}

} // namespace

Frame Oracle::Release(const PlanPtr &project) {
	auto cached = released_.find(project.get());
	if (cached != released_.end()) {
		return cached->second;
	}
	std::vector<PlanPtr> filters;
	PlanPtr cur = project->children[0];
	while (cur->kind == PlanKind::Filter) {
		filters.push_back(cur);
		cur = cur->children[0];
	}
	if (cur->kind != PlanKind::Aggregate || !IsPacAgg(cur.get())) {
		throw PacError(ErrorCode::OracleRefused, "released block is not an aggregate the oracle can replay");
	}

	std::vector<Frame> worlds;
	for (int j = 0; j < 64; j++) {
		Executor ex(db_, cfg_, session_);
		ex.oracle = this;
		ex.world = j;
		ex.ctes = &ctes_;
		worlds.push_back(ex.Run(cur));
	}
	const Schema &as = worlds[0].schema;
	size_t ng = cur->groups.size();

	// union of group keys; absent worlds stay -1
	std::map<std::vector<Value>, std::array<int64_t, 64>, KeyLess> groups;
	for (int j = 0; j < 64; j++) {
		const Relation &rel = *worlds[j].data;
		for (size_t r = 0; r < rel.rows(); r++) {
			std::vector<Value> key(ng);
			for (size_t i = 0; i < ng; i++) {
				key[i] = rel.cols[i][r];
			}
			auto [it, added] = groups.try_emplace(std::move(key));
			if (added) {
				it->second.fill(-1);
			}
			it->second[j] = int64_t(r);
		}
	}
	std::vector<const std::array<int64_t, 64> *> live;
	for (auto &[k, rows] : groups) {
		live.push_back(&rows);
	}
	auto ctx_of = [&](int j, int64_t r) { return RowCtx {worlds[j].data.get(), size_t(r), -1, nullptr}; };
	auto representative = [&](const std::array<int64_t, 64> &rows) {
		for (int j = 0; j < 64; j++) {
			if (rows[j] >= 0) {
				return j;
			}
		}
		return -1;
	};

	// HAVING, innermost first: one draw per group for predicates over aggregates
	for (auto it = filters.rbegin(); it != filters.rend(); ++it) {
		auto pred = Bind((*it)->pred, as);
		bool per_world = RefsFrom(pred, ng);
		std::vector<const std::array<int64_t, 64> *> next;
		for (auto *rows : live) {
			bool keep;
			if (per_world) {
				uint64_t bits = 0;
				for (int j = 0; j < 64; j++) {
					if ((*rows)[j] >= 0 && IsTrue(Eval(*pred, ctx_of(j, (*rows)[j])))) {
						bits |= 1ULL << j;
					}
				}
				keep = session_.Filter(bits);
			} else {
				int j = representative(*rows);
				keep = IsTrue(Eval(*pred, ctx_of(j, (*rows)[j])));
			}
			if (keep) {
				next.push_back(rows);
			}
		}
		live = std::move(next);
	}

	std::vector<ExprPtr> bound;
	std::vector<bool> noised;
	for (auto &e : project->exprs) {
		bound.push_back(Bind(e, as));
		noised.push_back(RefsFrom(bound.back(), ng));
	}
	Schema out = DeriveNodeSchema(*project, {&as});
	for (size_t i = 0; i < bound.size(); i++) {
		if (noised[i]) {
			out[i].type = Type::Float64;
			out[i].nullable = true;
			out[i].lifted = false;
		}
	}
	auto rel = std::make_shared<Relation>();
	rel->cols.resize(bound.size());
	for (auto *rows : live) {
		int rep = representative(*rows);
		for (size_t i = 0; i < bound.size(); i++) {
			if (!noised[i]) {
				rel->cols[i].push_back(Eval(*bound[i], ctx_of(rep, (*rows)[rep])));
				continue;
			}
			WorldVector v;
			for (int j = 0; j < 64; j++) {
				if ((*rows)[j] < 0) {
					continue;
				}
				Value x = Eval(*bound[i], ctx_of(j, (*rows)[j]));
				if (!x.is_null()) {
					v.values[j] = x.to_double();
					v.mask |= 1ULL << j;
				}
			}
			rel->cols[i].push_back(session_.Noised(v, 1.0));
		}
	}
	Frame f {std::move(out), rel};
	released_.emplace(project.get(), f);
	return f;
}

Relation ExecuteOracle(const PlanPtr &normalized, const Analysis &analysis, const PrivacyCatalog &catalog,
                       const Database &db, const ExecConfig &cfg) {
	if (analysis.cls.kind != Classification::Kind::Rewritable) {
		throw PacError(ErrorCode::OracleRefused, "the oracle only replays rewritable queries (" +
		                                             analysis.cls.ToString() + ")");
	}
	NoiseSession session(cfg.seed, cfg.budget, cfg.noise);
	Oracle oracle(catalog, db, cfg, analysis, session);
	return oracle.Run(normalized);
}

Relation RunOracle(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg) {
	PlanPtr p = PrepareQuery(sql, catalog);
	Analysis an = Analyze(p, catalog);
	return ExecuteOracle(p, an, catalog, db, cfg);
}

} // namespace pac
