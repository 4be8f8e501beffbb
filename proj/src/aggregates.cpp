#include "pac/aggregates.hpp"

#include "pac/errors.hpp"
#include "pac/worlds.hpp"

#include <cmath>

namespace pac {

const char *AggTierName(AggTier t) {
	switch (t) {
	case AggTier::Naive:
		return "naive";
	case AggTier::Predicated:
		return "predicated";
	case AggTier::Swar:
		return "swar";
	}
	return "?";
}

double AggScale(AggKind kind) {
	switch (kind) {
	case AggKind::Count:
	case AggKind::CountStar:
	case AggKind::Sum:
		return 2.0;
	default:
		return 1.0;
	}
}

namespace {

template <class C>
struct CountK : C {
	void Update(uint64_t pu, int64_t) {
		C::Update(pu);
	}
	void Combine(const CountK &o) {
		C::Combine(o);
	}
};

template <class S, class C, class T>
struct AvgK {
	S sum;
	C cnt;
	uint64_t mask = 0, updates = 0;
	void Update(uint64_t pu, T v) {
		sum.Update(pu, v);
		cnt.Update(pu, 0);
		mask |= pu;
		updates++;
	}
	void Combine(const AvgK &o) {
		sum.Combine(o.sum);
		cnt.Combine(o.cnt);
		mask |= o.mask;
		updates += o.updates;
	}
};

// ---- slot extraction, one overload per kernel family ----

template <class C>
void SlotsOf(const CountK<C> &k, std::array<double, 64> &out) {
	std::array<uint64_t, 64> c;
	k.Counts(c);
	for (int j = 0; j < 64; j++) {
		out[j] = double(c[j]);
	}
}

template <class K>
auto SlotsOf(const K &k, std::array<double, 64> &out) -> decltype(k.Sums(std::declval<std::array<i128, 64> &>())) {
	std::array<i128, 64> s;
	k.Sums(s);
	for (int j = 0; j < 64; j++) {
		out[j] = double(s[j]);
	}
}

inline void SlotsOf(const ApproxSum &k, std::array<double, 64> &out) {
	k.Slots(out);
}
inline void SlotsOf(const FloatSumNaive &k, std::array<double, 64> &out) {
	k.Slots(out);
}
inline void SlotsOf(const FloatSumPredicated &k, std::array<double, 64> &out) {
	k.Slots(out);
}

template <template <class, bool> class M, class T, bool X>
void SlotsOf(const M<T, X> &k, std::array<double, 64> &out) {
	std::array<T, 64> e;
	k.Slots(e);
	for (int j = 0; j < 64; j++) {
		out[j] = double(e[j]);
	}
}

template <class S, class C, class T>
void SlotsOf(const AvgK<S, C, T> &k, std::array<double, 64> &out) {
	std::array<double, 64> s, c;
	SlotsOf(k.sum, s);
	SlotsOf(k.cnt, c);
	for (int j = 0; j < 64; j++) {
		out[j] = c[j] > 0 ? s[j] / c[j] : 0.0;
	}
}

template <class K, class T>
void SlotsOf(const Buffered<K, T> &k, std::array<double, 64> &out) {
	k.WithInner([&](const K &inner) { SlotsOf(inner, out); });
}

template <class K, class T>
class KernelState final : public AggState {
public:
	void Update(uint64_t pu, const Value &v) override {
		if constexpr (std::is_same_v<T, double>) {
			k_.Update(pu, v.to_double());
		} else {
			k_.Update(pu, v.type() == Type::Int64 ? v.as_int() : 0);
		}
	}
	void Combine(const AggState &other) override {
		auto *o = dynamic_cast<const KernelState *>(&other);
		if (!o) {
			throw PacError(ErrorCode::Internal, "combine of mismatched aggregate states");
		}
		k_.Combine(o->k_);
	}
	WorldVector FinalizeRaw() const override {
		DiversityCheck(k_.updates, k_.mask);
		WorldVector out;
		SlotsOf(k_, out.values);
		out.mask = k_.mask;
		for (int j = 0; j < 64; j++) {
			if (!out.Has(j)) {
				out.values[j] = 0.0;
			}
		}
		return out;
	}
	uint64_t mask() const override {
		return k_.mask;
	}
	uint64_t update_count() const override {
		return k_.updates;
	}

private:
	K k_;
};

template <class K, class T>
std::unique_ptr<AggState> Wrap(bool buffered) {
	if (buffered) {
		return std::make_unique<KernelState<Buffered<K, T>, T>>();
	}
	return std::make_unique<KernelState<K, T>>();
}

template <class C>
std::unique_ptr<AggState> MakeAvgInt(const AggOptions &o) {
	if (o.approx) {
		return Wrap<AvgK<ApproxSum, C, int64_t>, int64_t>(o.buffered);
	}
	switch (o.tier) {
	case AggTier::Naive:
		return Wrap<AvgK<SumNaive, C, int64_t>, int64_t>(o.buffered);
	case AggTier::Predicated:
		return Wrap<AvgK<SumPredicated, C, int64_t>, int64_t>(o.buffered);
	default:
		return Wrap<AvgK<ExactSum, C, int64_t>, int64_t>(o.buffered);
	}
}

template <class C>
struct CountKD : CountK<C> {
	void Update(uint64_t pu, double) {
		C::Update(pu);
	}
};

template <class C>
void SlotsOf(const CountKD<C> &k, std::array<double, 64> &out) {
	SlotsOf(static_cast<const CountK<C> &>(k), out);
}

template <class T, bool X>
std::unique_ptr<AggState> MakeMinMax(const AggOptions &o) {
	switch (o.tier) {
	case AggTier::Naive:
		return Wrap<MinMaxNaive<T, X>, T>(o.buffered);
	case AggTier::Predicated:
		return Wrap<MinMaxPredicated<T, X>, T>(o.buffered);
	default:
		return Wrap<MinMaxPruned<T, X>, T>(o.buffered);
	}
}

} // namespace

std::unique_ptr<AggState> MakeAggState(AggKind kind, Type input, const AggOptions &o) {
	if (kind == AggKind::Count || kind == AggKind::CountStar) {
		switch (o.tier) {
		case AggTier::Naive:
			return Wrap<CountK<CountNaive>, int64_t>(o.buffered);
		case AggTier::Predicated:
			return Wrap<CountK<CountPredicated>, int64_t>(o.buffered);
		default:
			return Wrap<CountK<CountSwar>, int64_t>(o.buffered);
		}
	}
	if (input != Type::Int64 && input != Type::Float64) {
		throw PacError(ErrorCode::TypeMismatch,
		               std::string(AggKindName(kind)) + " over " + TypeName(input) + " is not supported");
	}
	bool is_int = input == Type::Int64;
	switch (kind) {
	case AggKind::Sum:
		if (is_int) {
			if (o.approx) {
				return Wrap<ApproxSum, int64_t>(o.buffered);
			}
			switch (o.tier) {
			case AggTier::Naive:
				return Wrap<SumNaive, int64_t>(o.buffered);
			case AggTier::Predicated:
				return Wrap<SumPredicated, int64_t>(o.buffered);
			default:
				return Wrap<ExactSum, int64_t>(o.buffered);
			}
		}
		if (o.tier == AggTier::Naive) {
			return Wrap<FloatSumNaive, double>(o.buffered);
		}
		return Wrap<FloatSumPredicated, double>(o.buffered);
	case AggKind::Avg:
		if (is_int) {
			switch (o.tier) {
			case AggTier::Naive:
				return MakeAvgInt<CountK<CountNaive>>(o);
			case AggTier::Predicated:
				return MakeAvgInt<CountK<CountPredicated>>(o);
			default:
				return MakeAvgInt<CountK<CountSwar>>(o);
			}
		}
		switch (o.tier) {
		case AggTier::Naive:
			return Wrap<AvgK<FloatSumNaive, CountKD<CountNaive>, double>, double>(o.buffered);
		case AggTier::Predicated:
			return Wrap<AvgK<FloatSumPredicated, CountKD<CountPredicated>, double>, double>(o.buffered);
		default:
			return Wrap<AvgK<FloatSumPredicated, CountKD<CountSwar>, double>, double>(o.buffered);
		}
	case AggKind::Min:
		return is_int ? MakeMinMax<int64_t, false>(o) : MakeMinMax<double, false>(o);
	case AggKind::Max:
		return is_int ? MakeMinMax<int64_t, true>(o) : MakeMinMax<double, true>(o);
	default:
		break;
	}
	throw PacError(ErrorCode::Internal, "unknown aggregate kind");
}

} // namespace pac
