// internal: the materializing executor shared by the engine and the oracle

#ifndef PAC_EXECUTOR_HPP
#define PAC_EXECUTOR_HPP

#include "pac/engine.hpp"

#include <map>
#include <memory>
#include <optional>

namespace pac {

// data columns may be shared with the database; data->schema is not consulted
struct Frame {
	Schema schema;
	std::shared_ptr<const Relation> data;

	size_t rows() const {
		return data->rows();
	}
	Relation Materialize() const;
};

struct CteSlot {
	PlanPtr body;
	std::optional<Frame> frame;
	// oracle: re-run per world instead of materialized once
	bool per_world = false;
};
using CteScope = std::map<std::string, CteSlot>;

class Oracle;

class Executor : public EvalHooks {
public:
	Executor(const Database &db, const ExecConfig &cfg, NoiseSession &session);

	Frame Run(const PlanPtr &p);

	uint64_t Salt() override {
		return session_.salt();
	}
	bool PacFilter(uint64_t bits) override {
		return session_.Filter(bits);
	}
	Value PacNoised(const WorldVector &v, double scale) override {
		return session_.Noised(v, scale);
	}
	Value ScalarSubquery(const PlanNode *plan) override;

	// oracle wiring: world >= 0 restricts linked scans to that world
	Oracle *oracle = nullptr;
	int world = -1;
	std::vector<CteScope> *ctes = nullptr;

private:
	Frame Scan(const PlanPtr &n);
	Frame CteRef(const PlanPtr &n);
	Frame Filter(const PlanPtr &n);
	Frame Project(const PlanPtr &n);
	Frame Join(const PlanPtr &n);
	Frame Aggregate(const PlanPtr &n);
	Frame PacAggregate(const PlanPtr &n, const Frame &in);
	Frame Sort(const PlanPtr &n);
	Frame Limit(const PlanPtr &n);
	Frame With(const PlanPtr &n);
	Frame SetOp(const PlanPtr &n);

	const Database &db_;
	const ExecConfig &cfg_;
	NoiseSession &session_;
	std::vector<CteScope> own_ctes_;
	std::map<const PlanNode *, Value> subq_cache_;
	std::map<std::string, Frame> world_ctes_;
};

class Oracle {
public:
	Oracle(const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg, const Analysis &an,
	       NoiseSession &session);

	Relation Run(const PlanPtr &normalized);

	bool IsRelease(const PlanNode *p) const {
		return an_.pac_releases.count(p) != 0;
	}
	bool IsPacAgg(const PlanNode *p) const {
		return an_.pac_aggs.count(p) != 0;
	}
	bool IsPuCte(const std::string &name) const {
		return an_.pu_ctes.count(name) != 0;
	}
	const std::vector<uint64_t> *Membership(const std::string &table) const {
		auto it = member_.find(table);
		return it == member_.end() ? nullptr : &it->second;
	}
	Frame Release(const PlanPtr &project);

private:
	const Database &db_;
	const ExecConfig &cfg_;
	const Analysis &an_;
	NoiseSession &session_;
	std::map<std::string, std::vector<uint64_t>> member_;
	std::map<const PlanNode *, Frame> released_;
	std::vector<CteScope> ctes_;
};

// group-key helpers
struct KeyHash {
	size_t operator()(const std::vector<Value> &k) const;
};
struct KeyEq {
	bool operator()(const std::vector<Value> &a, const std::vector<Value> &b) const;
};
struct KeyLess {
	bool operator()(const std::vector<Value> &a, const std::vector<Value> &b) const;
};

} // namespace pac

#endif // PAC_EXECUTOR_HPP
