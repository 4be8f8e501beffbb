#include "executor.hpp"

#include "pac/csv.hpp"
#include "pac/errors.hpp"
#include "pac/hash.hpp"
#include "pac/parser.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace pac {

size_t KeyHash::operator()(const std::vector<Value> &k) const {
	uint64_t h = 0x9e3779b97f4a7c15ULL;
	for (auto &v : k) {
		h = Fmix64(h ^ (v.is_null() ? 0x5bd1e995ULL : HashValue(v)));
	}
	return size_t(h);
}

bool KeyEq::operator()(const std::vector<Value> &a, const std::vector<Value> &b) const {
	if (a.size() != b.size()) {
		return false;
	}
	for (size_t i = 0; i < a.size(); i++) {
		if (a[i].is_null() != b[i].is_null()) {
			return false;
		}
		if (!a[i].is_null() && !Equal(a[i], b[i])) {
			return false;
		}
	}
	return true;
}

bool KeyLess::operator()(const std::vector<Value> &a, const std::vector<Value> &b) const {
	for (size_t i = 0; i < a.size() && i < b.size(); i++) {
		int c = Compare(a[i], b[i]);
		if (c != 0) {
			return c < 0;
		}
	}
	return a.size() < b.size();
}

Relation Frame::Materialize() const {
	Relation r;
	r.schema = schema;
	r.cols = data->cols;
	return r;
}

namespace {

Schema Requalify(Schema s, const std::string &qual) {
	for (size_t i = 0; i < s.size(); i++) {
		s[i].qual = qual;
	}
	return s;
}

Frame Gather(const Frame &in, const std::vector<uint32_t> &idx) {
	auto out = std::make_shared<Relation>();
	out->cols.resize(in.schema.size());
	for (size_t c = 0; c < out->cols.size(); c++) {
		auto &src = in.data->cols[c];
		auto &dst = out->cols[c];
		dst.reserve(idx.size());
		for (auto r : idx) {
			dst.push_back(src[r]);
		}
	}
	return Frame {in.schema, out};
}

Frame Wrap(Schema s, std::vector<std::vector<Value>> cols) {
	auto out = std::make_shared<Relation>();
	out->cols = std::move(cols);
	if (out->cols.size() < s.size()) {
		out->cols.resize(s.size());
	}
	return Frame {std::move(s), out};
}

// plain SQL aggregate over one group
struct PlainAgg {
	AggKind kind = AggKind::CountStar;
	bool int_input = false;
	int64_t count = 0;
	i128 isum = 0;
	double fsum = 0.0;
	Value best;

	void Update(const Value &v) {
		if (kind == AggKind::CountStar) {
			count++;
			return;
		}
		if (v.is_null()) {
			return;
		}
		count++;
		switch (kind) {
		case AggKind::Sum:
		case AggKind::Avg:
			if (int_input) {
				isum += v.as_int();
			} else {
				fsum += v.to_double();
			}
			break;
		case AggKind::Min:
			if (best.is_null() || Compare(v, best) < 0) {
				best = v;
			}
			break;
		case AggKind::Max:
			if (best.is_null() || Compare(v, best) > 0) {
				best = v;
			}
			break;
		default:
			break;
		}
	}

	// world: per-world run of a PAC aggregate (empty -> Null, count/sum doubled)
	Value Final(bool world) const {
		switch (kind) {
		case AggKind::Count:
		case AggKind::CountStar:
			if (world) {
				return count == 0 ? Value::Null() : Value::Int(2 * count);
			}
			return Value::Int(count);
		case AggKind::Sum: {
			if (count == 0) {
				return Value::Null();
			}
			if (!int_input) {
				return Value::Float(world ? 2.0 * fsum : fsum);
			}
			i128 s = world ? 2 * isum : isum;
			if (s > i128(INT64_MAX) || s < i128(INT64_MIN)) {
				throw PacError(ErrorCode::DataError, "integer sum overflow");
			}
			return Value::Int(int64_t(s));
		}
		case AggKind::Avg:
			if (count == 0) {
				return Value::Null();
			}
			return Value::Float(int_input ? double(isum) / double(count) : fsum / double(count));
		case AggKind::Min:
		case AggKind::Max:
			return best;
		}
		return Value::Null();
	}
};

bool Doubled(AggKind k) {
	return k == AggKind::Count || k == AggKind::CountStar || k == AggKind::Sum;
}

} // namespace

// ---------------------------------------------------------------------------

Executor::Executor(const Database &db, const ExecConfig &cfg, NoiseSession &session)
    : db_(db), cfg_(cfg), session_(session) {
	ctes = &own_ctes_;
}

Frame Executor::Run(const PlanPtr &n) {
	switch (n->kind) {
	case PlanKind::Scan:
		return Scan(n);
	case PlanKind::CteRef:
		return CteRef(n);
	case PlanKind::Filter:
		return Filter(n);
	case PlanKind::Project:
		if (oracle && oracle->IsRelease(n.get())) {
			return oracle->Release(n);
		}
		return Project(n);
	case PlanKind::Join:
		return Join(n);
	case PlanKind::Aggregate:
		return Aggregate(n);
	case PlanKind::Sort:
		return Sort(n);
	case PlanKind::Limit:
		return Limit(n);
	case PlanKind::With:
		return With(n);
	case PlanKind::SetOp:
		return SetOp(n);
	case PlanKind::Values:
		return Wrap(DeriveNodeSchema(*n, {}), {{Value::Int(1)}});
	case PlanKind::Unsupported:
		throw PacError(ErrorCode::UnsupportedSyntax, "cannot execute: " + n->note);
	}
	throw PacError(ErrorCode::Internal, "unhandled plan node");
}

Value Executor::ScalarSubquery(const PlanNode *plan) {
	auto it = subq_cache_.find(plan);
	if (it != subq_cache_.end()) {
		return it->second;
	}
	PlanPtr p(PlanPtr(), const_cast<PlanNode *>(plan));
	Frame f = Run(p);
	if (f.schema.size() != 1) {
		throw PacError(ErrorCode::DataError, "scalar subquery must return one column");
	}
	if (f.rows() > 1) {
		throw PacError(ErrorCode::DataError, "scalar subquery returned more than one row");
	}
	Value v = f.rows() == 0 ? Value::Null() : f.data->cols[0][0];
	subq_cache_.emplace(plan, v);
	return v;
}

Frame Executor::Scan(const PlanPtr &n) {
	const Relation &t = db_.Get(n->table);
	Frame f {Requalify(t.schema, n->alias.empty() ? n->table : n->alias),
	         std::shared_ptr<const Relation>(std::shared_ptr<const Relation>(), &t)};
	if (world < 0 || !oracle) {
		return f;
	}
	auto *m = oracle->Membership(n->table);
	if (!m) {
		return f;
	}
	std::vector<uint32_t> idx;
	for (size_t r = 0; r < m->size(); r++) {
		if (((*m)[r] >> world) & 1ULL) {
			idx.push_back(uint32_t(r));
		}
	}
	return Gather(f, idx);
}

Frame Executor::CteRef(const PlanPtr &n) {
	std::string qual = n->alias.empty() ? n->table : n->alias;
	for (auto it = ctes->rbegin(); it != ctes->rend(); ++it) {
		auto f = it->find(n->table);
		if (f == it->end()) {
			continue;
		}
		CteSlot &slot = f->second;
		if (slot.frame) {
			return Frame {Requalify(slot.frame->schema, qual), slot.frame->data};
		}
		if (world < 0) {
			throw PacError(ErrorCode::OracleRefused, "PU-derived CTE " + n->table + " used outside a released aggregate");
		}
		auto w = world_ctes_.find(n->table);
		if (w == world_ctes_.end()) {
			w = world_ctes_.emplace(n->table, Run(slot.body)).first;
		}
		return Frame {Requalify(w->second.schema, qual), w->second.data};
	}
	throw PacError(ErrorCode::UnknownTable, "unknown CTE: " + n->table);
}

Frame Executor::Filter(const PlanPtr &n) {
	Frame in = Run(n->children[0]);
	auto pred = Bind(n->pred, in.schema);
	std::vector<uint32_t> keep;
	RowCtx ctx {in.data.get(), 0, -1, this};
	for (size_t r = 0; r < in.rows(); r++) {
		ctx.row = r;
		if (IsTrue(Eval(*pred, ctx))) {
			keep.push_back(uint32_t(r));
		}
	}
	if (keep.size() == in.rows()) {
		return in;
	}
	return Gather(in, keep);
}

Frame Executor::Project(const PlanPtr &n) {
	Frame in = Run(n->children[0]);
	std::vector<ExprPtr> bound;
	for (auto &e : n->exprs) {
		bound.push_back(Bind(e, in.schema));
	}
	Schema out = DeriveNodeSchema(*n, {&in.schema});
	std::vector<std::vector<Value>> cols(bound.size());
	for (auto &c : cols) {
		c.reserve(in.rows());
	}
	// row-outer: noised cells are drawn in row-major order
	RowCtx ctx {in.data.get(), 0, -1, this};
	for (size_t r = 0; r < in.rows(); r++) {
		ctx.row = r;
		for (size_t i = 0; i < bound.size(); i++) {
			cols[i].push_back(Eval(*bound[i], ctx));
		}
	}
	return Wrap(std::move(out), std::move(cols));
}

Frame Executor::Join(const PlanPtr &n) {
	Frame l = Run(n->children[0]);
	Frame r = Run(n->children[1]);
	Schema js = DeriveNodeSchema(*n, {&l.schema, &r.schema});
	std::vector<ExprPtr> lk, rk;
	for (auto &k : n->lkeys) {
		lk.push_back(Bind(k, l.schema));
	}
	for (auto &k : n->rkeys) {
		rk.push_back(Bind(k, r.schema));
	}

	constexpr uint32_t kNone = UINT32_MAX;
	std::vector<uint32_t> li, ri;
	if (lk.empty()) {
		for (uint32_t a = 0; a < l.rows(); a++) {
			for (uint32_t b = 0; b < r.rows(); b++) {
				li.push_back(a);
				ri.push_back(b);
			}
		}
	} else {
		std::unordered_map<std::vector<Value>, std::vector<uint32_t>, KeyHash, KeyEq> build;
		RowCtx rc {r.data.get(), 0, -1, this};
		std::vector<Value> key(rk.size());
		for (size_t b = 0; b < r.rows(); b++) {
			rc.row = b;
			bool null = false;
			for (size_t i = 0; i < rk.size(); i++) {
				key[i] = Eval(*rk[i], rc);
				null |= key[i].is_null();
			}
			if (!null) {
				build[key].push_back(uint32_t(b));
			}
		}
		RowCtx lc {l.data.get(), 0, -1, this};
		for (size_t a = 0; a < l.rows(); a++) {
			lc.row = a;
			bool null = false;
			for (size_t i = 0; i < lk.size(); i++) {
				key[i] = Eval(*lk[i], lc);
				null |= key[i].is_null();
			}
			if (null) {
				continue;
			}
			auto it = build.find(key);
			if (it == build.end()) {
				continue;
			}
			for (auto b : it->second) {
				li.push_back(uint32_t(a));
				ri.push_back(b);
			}
		}
	}

	auto assemble = [&](const std::vector<uint32_t> &a, const std::vector<uint32_t> &b) {
		std::vector<std::vector<Value>> cols(js.size());
		size_t nl = l.schema.size();
		for (size_t c = 0; c < nl; c++) {
			auto &src = l.data->cols[c];
			cols[c].reserve(a.size());
			for (auto x : a) {
				cols[c].push_back(src[x]);
			}
		}
		for (size_t c = 0; c < r.schema.size(); c++) {
			auto &src = r.data->cols[c];
			auto &dst = cols[nl + c];
			dst.reserve(b.size());
			for (auto x : b) {
				dst.push_back(x == kNone ? Value::Null() : src[x]);
			}
		}
		return Wrap(js, std::move(cols));
	};

	std::vector<char> keep(li.size(), 1);
	if (n->residual) {
		Frame cand = assemble(li, ri);
		auto res = Bind(n->residual, js);
		RowCtx ctx {cand.data.get(), 0, -1, this};
		for (size_t k = 0; k < li.size(); k++) {
			ctx.row = k;
			keep[k] = IsTrue(Eval(*res, ctx));
		}
	}
	std::vector<uint32_t> oa, ob;
	if (n->join == JoinKind::Left) {
		size_t k = 0;
		for (uint32_t a = 0; a < l.rows(); a++) {
			bool any = false;
			for (; k < li.size() && li[k] == a; k++) {
				if (keep[k]) {
					oa.push_back(a);
					ob.push_back(ri[k]);
					any = true;
				}
			}
			if (!any) {
				oa.push_back(a);
				ob.push_back(kNone);
			}
		}
	} else {
		for (size_t k = 0; k < li.size(); k++) {
			if (keep[k]) {
				oa.push_back(li[k]);
				ob.push_back(ri[k]);
			}
		}
	}
	return assemble(oa, ob);
}

Frame Executor::Aggregate(const PlanPtr &n) {
	Frame in = Run(n->children[0]);
	bool pac = false;
	for (auto &a : n->aggs) {
		pac |= a.pac != PacMode::None;
	}
	if (pac) {
		return PacAggregate(n, in);
	}
	bool world_pac = false;
	if (oracle && oracle->IsPacAgg(n.get())) {
		if (world < 0) {
			throw PacError(ErrorCode::OracleRefused, "PAC aggregate outside a released query block");
		}
		world_pac = true;
	}

	std::vector<ExprPtr> groups, args;
	for (auto &g : n->groups) {
		groups.push_back(Bind(g, in.schema));
	}
	for (auto &a : n->aggs) {
		args.push_back(a.arg ? Bind(a.arg, in.schema) : nullptr);
	}
	std::unordered_map<std::vector<Value>, size_t, KeyHash, KeyEq> index;
	std::vector<std::vector<Value>> keys;
	std::vector<std::vector<PlainAgg>> states;
	auto fresh = [&]() {
		std::vector<PlainAgg> s;
		for (size_t i = 0; i < n->aggs.size(); i++) {
			PlainAgg p;
			p.kind = n->aggs[i].kind;
			p.int_input = args[i] && args[i]->type == Type::Int64;
			s.push_back(p);
		}
		return s;
	};
	if (groups.empty()) {
		index.emplace(std::vector<Value> {}, 0);
		keys.emplace_back();
		states.push_back(fresh());
	}
	RowCtx ctx {in.data.get(), 0, -1, this};
	std::vector<Value> key(groups.size());
	for (size_t r = 0; r < in.rows(); r++) {
		ctx.row = r;
		for (size_t i = 0; i < groups.size(); i++) {
			key[i] = Eval(*groups[i], ctx);
		}
		auto [it, fresh_key] = index.try_emplace(key, keys.size());
		if (fresh_key) {
			keys.push_back(key);
			states.push_back(fresh());
		}
		auto &st = states[it->second];
		for (size_t i = 0; i < st.size(); i++) {
			st[i].Update(args[i] ? Eval(*args[i], ctx) : Value());
		}
	}
	std::vector<size_t> order(keys.size());
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return KeyLess()(keys[a], keys[b]); });

	Schema out = DeriveNodeSchema(*n, {&in.schema});
	std::vector<std::vector<Value>> cols(out.size());
	for (auto g : order) {
		for (size_t i = 0; i < groups.size(); i++) {
			cols[i].push_back(keys[g][i]);
		}
		for (size_t i = 0; i < n->aggs.size(); i++) {
			Value v = states[g][i].Final(world_pac);
			if (n->aggs[i].null_on_empty && states[g][i].count == 0) {
				v = Value::Null();
			}
			cols[groups.size() + i].push_back(v);
		}
	}
	return Wrap(std::move(out), std::move(cols));
}

namespace {

struct PacPart {
	std::unordered_map<std::vector<Value>, size_t, KeyHash, KeyEq> index;
	std::vector<std::vector<Value>> keys;
	std::vector<std::vector<std::unique_ptr<AggState>>> states;
};

} // namespace

Frame Executor::PacAggregate(const PlanPtr &n, const Frame &in) {
	std::vector<ExprPtr> groups, args;
	for (auto &g : n->groups) {
		groups.push_back(Bind(g, in.schema));
	}
	std::vector<Type> types;
	bool subq = false;
	for (auto &g : groups) {
		subq |= ContainsSubquery(g);
	}
	for (auto &a : n->aggs) {
		args.push_back(a.arg ? Bind(a.arg, in.schema) : nullptr);
		types.push_back(args.back() ? args.back()->type : Type::Int64);
		subq |= args.back() && ContainsSubquery(args.back());
	}
	ExprPtr pu_src = n->aggs[0].pu ? n->aggs[0].pu : MakeColumn("", "pu");
	auto pu = Bind(pu_src, in.schema);
	if (pu->type != Type::Hash) {
		throw PacError(ErrorCode::Internal, "PAC aggregate without a hash column");
	}

	auto fresh = [&]() {
		std::vector<std::unique_ptr<AggState>> s;
		for (size_t i = 0; i < n->aggs.size(); i++) {
			s.push_back(MakeAggState(n->aggs[i].kind, types[i], cfg_.agg));
		}
		return s;
	};
	auto work = [&](size_t lo, size_t hi, PacPart &part) {
		RowCtx ctx {in.data.get(), 0, -1, this};
		std::vector<Value> key(groups.size());
		for (size_t r = lo; r < hi; r++) {
			ctx.row = r;
			Value h = Eval(*pu, ctx);
			if (h.is_null() || h.as_hash() == 0) {
				continue;
			}
			uint64_t bits = h.as_hash();
			for (size_t i = 0; i < groups.size(); i++) {
				key[i] = Eval(*groups[i], ctx);
			}
			auto [it, added] = part.index.try_emplace(key, part.keys.size());
			if (added) {
				part.keys.push_back(key);
				part.states.push_back(fresh());
			}
			auto &st = part.states[it->second];
			for (size_t i = 0; i < st.size(); i++) {
				if (!args[i]) {
					st[i]->Update(bits, Value());
					continue;
				}
				Value v = Eval(*args[i], ctx);
				if (!v.is_null()) {
					st[i]->Update(bits, v);
				}
			}
		}
	};

	size_t rows = in.rows();
	size_t nthreads = subq ? 1 : size_t(std::max(1, cfg_.threads));
	nthreads = std::max<size_t>(1, std::min(nthreads, rows / 1024 + 1));
	std::vector<PacPart> parts(nthreads);
	if (nthreads == 1) {
		work(0, rows, parts[0]);
	} else {
		std::vector<std::thread> pool;
		for (size_t t = 0; t < nthreads; t++) {
			pool.emplace_back(work, rows * t / nthreads, rows * (t + 1) / nthreads, std::ref(parts[t]));
		}
		for (auto &th : pool) {
			th.join();
		}
	}
	PacPart &base = parts[0];
	for (size_t t = 1; t < nthreads; t++) {
		for (size_t g = 0; g < parts[t].keys.size(); g++) {
			auto [it, added] = base.index.try_emplace(parts[t].keys[g], base.keys.size());
			if (added) {
				base.keys.push_back(parts[t].keys[g]);
				base.states.push_back(std::move(parts[t].states[g]));
			} else {
				for (size_t i = 0; i < n->aggs.size(); i++) {
					base.states[it->second][i]->Combine(*parts[t].states[g][i]);
				}
			}
		}
	}
	if (groups.empty() && base.keys.empty()) {
		base.keys.emplace_back();
		base.states.push_back(fresh());
	}

	std::vector<size_t> order(base.keys.size());
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(),
	                 [&](size_t a, size_t b) { return KeyLess()(base.keys[a], base.keys[b]); });
	Schema out = DeriveNodeSchema(*n, {&in.schema});
	std::vector<std::vector<Value>> cols(out.size());
	for (auto g : order) {
		for (size_t i = 0; i < groups.size(); i++) {
			cols[i].push_back(base.keys[g][i]);
		}
		for (size_t i = 0; i < n->aggs.size(); i++) {
			auto v = std::make_shared<WorldVector>(base.states[g][i]->FinalizeRaw());
			if (n->aggs[i].pac == PacMode::Unfused && Doubled(n->aggs[i].kind)) {
				for (auto &x : v->values) {
					x *= 2.0;
				}
			}
			cols[groups.size() + i].push_back(Value::Vector(std::move(v)));
		}
	}
	return Wrap(std::move(out), std::move(cols));
}

Frame Executor::Sort(const PlanPtr &n) {
	Frame in = Run(n->children[0]);
	std::vector<ExprPtr> keys;
	for (auto &k : n->sort) {
		keys.push_back(Bind(k.expr, in.schema));
	}
	std::vector<std::vector<Value>> kv(in.rows());
	RowCtx ctx {in.data.get(), 0, -1, this};
	for (size_t r = 0; r < in.rows(); r++) {
		ctx.row = r;
		for (auto &k : keys) {
			kv[r].push_back(Eval(*k, ctx));
		}
	}
	std::vector<uint32_t> idx(in.rows());
	std::iota(idx.begin(), idx.end(), 0);
	std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
		for (size_t i = 0; i < keys.size(); i++) {
			int c = Compare(kv[a][i], kv[b][i]);
			if (c != 0) {
				return n->sort[i].desc ? c > 0 : c < 0;
			}
		}
		return false;
	});
	return Gather(in, idx);
}

Frame Executor::Limit(const PlanPtr &n) {
	Frame in = Run(n->children[0]);
	if (n->limit < 0 || size_t(n->limit) >= in.rows()) {
		return in;
	}
	std::vector<uint32_t> idx(size_t(n->limit));
	std::iota(idx.begin(), idx.end(), 0);
	return Gather(in, idx);
}

Frame Executor::With(const PlanPtr &n) {
	ctes->emplace_back();
	struct Pop {
		std::vector<CteScope> *s;
		~Pop() {
			s->pop_back();
		}
	} pop {ctes};
	for (size_t i = 0; i < n->cte_names.size(); i++) {
		CteSlot slot;
		slot.body = n->children[i];
		if (oracle && oracle->IsPuCte(n->cte_names[i])) {
			slot.per_world = true;
		} else {
			slot.frame = Run(slot.body);
		}
		ctes->back()[n->cte_names[i]] = std::move(slot);
	}
	return Run(n->children.back());
}

Frame Executor::SetOp(const PlanPtr &n) {
	Frame a = Run(n->children[0]);
	Frame b = Run(n->children[1]);
	if (a.schema.size() != b.schema.size()) {
		throw PacError(ErrorCode::TypeMismatch, "set operation inputs differ in width");
	}
	std::string op = Lower(n->note);
	size_t w = a.schema.size();
	auto row = [&](const Frame &f, size_t r) {
		std::vector<Value> v(w);
		for (size_t c = 0; c < w; c++) {
			v[c] = f.data->cols[c][r];
		}
		return v;
	};
	std::vector<std::vector<Value>> cols(w);
	auto emit = [&](const std::vector<Value> &v) {
		for (size_t c = 0; c < w; c++) {
			cols[c].push_back(v[c]);
		}
	};
	if (op == "union all") {
		for (size_t r = 0; r < a.rows(); r++) {
			emit(row(a, r));
		}
		for (size_t r = 0; r < b.rows(); r++) {
			emit(row(b, r));
		}
	} else if (op == "union" || op == "intersect" || op == "except") {
		std::unordered_map<std::vector<Value>, char, KeyHash, KeyEq> right, seen;
		for (size_t r = 0; r < b.rows(); r++) {
			right.emplace(row(b, r), 1);
		}
		for (size_t r = 0; r < a.rows(); r++) {
			auto v = row(a, r);
			bool in_b = right.count(v) != 0;
			if ((op == "intersect" && !in_b) || (op == "except" && in_b)) {
				continue;
			}
			if (seen.emplace(v, 1).second) {
				emit(v);
			}
		}
		if (op == "union") {
			for (size_t r = 0; r < b.rows(); r++) {
				auto v = row(b, r);
				if (seen.emplace(v, 1).second) {
					emit(v);
				}
			}
		}
	} else {
		throw PacError(ErrorCode::UnsupportedSyntax, "set operation " + op + " is not supported");
	}
	Schema s = DeriveNodeSchema(*n, {&a.schema, &b.schema});
	return Wrap(std::move(s), std::move(cols));
}

// ---------------------------------------------------------------------------

void Database::Put(const std::string &table, Relation rel) {
	tables_[table] = std::move(rel);
}

const Relation &Database::Get(const std::string &table) const {
	auto it = tables_.find(table);
	if (it == tables_.end()) {
		throw PacError(ErrorCode::UnknownTable, "no data loaded for table " + table);
	}
	return it->second;
}

Database Database::Load(const PrivacyCatalog &catalog, const std::string &dir) {
	Database db;
	for (auto &[name, def] : catalog.tables()) {
		auto path = std::filesystem::path(dir) / (name + ".csv");
		if (!std::filesystem::exists(path)) {
			throw PacError(ErrorCode::IoError, "missing data file " + path.string());
		}
		db.Put(name, ReadCsvFile(path.string(), def.schema));
	}
	return db;
}

Relation Execute(const PlanPtr &plan, const Database &db, const ExecConfig &cfg) {
	NoiseSession session(cfg.seed, cfg.budget, cfg.noise);
	Executor ex(db, cfg, session);
	return ex.Run(plan).Materialize();
}

QueryOutcome RunQuery(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg) {
	QueryOutcome out;
	out.analysis = Analyze(PrepareQuery(sql, catalog), catalog);
	if (out.rejected()) {
		return out;
	}
	NoiseSession session(cfg.seed, cfg.budget, cfg.noise);
	Executor ex(db, cfg, session);
	out.result = ex.Run(out.analysis.plan).Materialize();
	out.cells_released = session.cells_released();
	return out;
}

Relation RunExact(std::string_view sql, const PrivacyCatalog &catalog, const Database &db) {
	ExecConfig cfg;
	cfg.noise = false;
	return Execute(PrepareQuery(sql, catalog), db, cfg);
}

} // namespace pac
