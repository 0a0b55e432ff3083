#pragma once

// Exact desk-scale counting of solutions by signature aggregation.
//
// Both variants reduce to histograms over (k+1)-tuples: a full solution is a
// pair of half-tuples whose signatures agree (positive) or cancel (signed).
// Only non-decreasing tuples are visited, each weighted by its number of
// distinct orderings.

#include "paucity/core.hpp"
#include "paucity/systems.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace paucity {

struct CountOptions {
    unsigned threads = 1;
    std::uint64_t memory_budget = std::uint64_t{2} << 30;
};

struct CountResult {
    SystemSpec spec;
    unsigned long P = 0;
    Integer V;
    Integer L;
    Integer delta;
    double wall_time = 0.0;
    std::string tool_version{paucity::tool_version};

    /// Equality of everything except timing.
    bool same_counts(const CountResult& o) const {
        return spec == o.spec && P == o.P && V == o.V && L == o.L && delta == o.delta &&
               tool_version == o.tool_version;
    }
};

namespace detail {

using Int128 = __int128;

template <class Word>
struct KeyHash {
    std::size_t operator()(const std::vector<Word>& key) const noexcept {
        std::size_t h = 0xcbf29ce484222325ull;
        for (const auto& w : key) {
            std::size_t part;
            if constexpr (std::is_same_v<Word, Int128>) {
                const auto u = static_cast<unsigned __int128>(w);
                part = static_cast<std::size_t>(u) ^ (static_cast<std::size_t>(u >> 64) * 0x9E3779B97F4A7C15ull);
            } else {
                part = IntegerHash{}(w);
            }
            h ^= part + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

struct ClassStats {
    std::uint64_t tuples = 0;   // ordered (k+1)-tuples with this signature
    std::uint64_t diagonal = 0; // sum over member multisets of orderings^2
    std::uint64_t members = 0;  // distinct multisets

    void merge(const ClassStats& o) {
        tuples += o.tuples;
        diagonal += o.diagonal;
        members += o.members;
    }
};

template <class Word>
using Histogram = std::unordered_map<std::vector<Word>, ClassStats, KeyHash<Word>>;

/// Visits every non-decreasing tuple of length n over [lo, hi].
template <class Word>
class TupleScanner {
public:
    TupleScanner(const SystemSpec& spec, Value lo, Value hi) : spec_(spec), lo_(lo), hi_(hi) {
        const std::size_t width = static_cast<std::size_t>(hi - lo + 1);
        powers_.resize(width * spec.k);
        for (Value v = lo; v <= hi; ++v)
            for (unsigned j = 1; j <= spec.k; ++j) {
                Integer p = ipow(Integer(static_cast<long>(v)), (2 * j - 1) * spec.d);
                powers_[static_cast<std::size_t>(v - lo) * spec.k + (j - 1)] = from_integer(p);
            }
        for (unsigned i = 0; i <= spec.half_length(); ++i)
            factorials_.push_back(factorial(i).get_ui());
    }

    Value lo() const { return lo_; }
    Value hi() const { return hi_; }

    /// visit(tuple, signature, orderings) for all tuples whose first entry is `first`.
    template <class Visit>
    void scan_first(Value first, Visit&& visit) const {
        const unsigned n = spec_.half_length();
        const unsigned k = spec_.k;
        Tuple tuple(n);
        std::vector<std::vector<Word>> sums(n, std::vector<Word>(k));
        tuple[0] = first;
        for (unsigned j = 0; j < k; ++j) sums[0][j] = power(first, j);

        auto rec = [&](auto&& self, unsigned depth) -> void {
            if (depth == n) {
                visit(static_cast<const Tuple&>(tuple), static_cast<const std::vector<Word>&>(sums[n - 1]),
                      orderings(tuple));
                return;
            }
            for (Value v = tuple[depth - 1]; v <= hi_; ++v) {
                tuple[depth] = v;
                for (unsigned j = 0; j < k; ++j) sums[depth][j] = sums[depth - 1][j] + power(v, j);
                self(self, depth + 1);
            }
        };
        rec(rec, 1);
    }

    std::uint64_t orderings(const Tuple& sorted) const {
        std::uint64_t denom = 1;
        std::size_t run = 1;
        for (std::size_t i = 1; i <= sorted.size(); ++i) {
            if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
                ++run;
            } else {
                denom *= factorials_[run];
                run = 1;
            }
        }
        return factorials_[sorted.size()] / denom;
    }

    static Word from_integer(const Integer& x) {
        if constexpr (std::is_same_v<Word, Int128>) {
            unsigned __int128 mag = 0;
            std::size_t words = 0;
            unsigned char bytes[16] = {};
            ensure(mpz_sizeinbase(x.get_mpz_t(), 2) <= 126, "value does not fit the 128-bit path");
            mpz_export(bytes, &words, -1, 1, 0, 0, x.get_mpz_t());
            for (std::size_t i = words; i-- > 0;) mag = (mag << 8) | bytes[i];
            const auto v = static_cast<Int128>(mag);
            return x < 0 ? -v : v;
        } else {
            return x;
        }
    }

private:
    const Word& power(Value v, unsigned j) const {
        return powers_[static_cast<std::size_t>(v - lo_) * spec_.k + j];
    }

    SystemSpec spec_;
    Value lo_, hi_;
    std::vector<Word> powers_;
    std::vector<std::uint64_t> factorials_;
};

/*
 * Runs make() once per worker and feeds it every first value of the box.
 * Workers pull first values from a shared counter; the returned states are
 * in worker order and must be merged with an order-independent operation.
 */
template <class State, class Make, class Work>
std::vector<State> run_partitioned(Value lo, Value hi, unsigned threads, Make make, Work work) {
    threads = std::max(1u, threads);
    std::vector<State> states;
    states.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) states.push_back(make());
    if (threads == 1) {
        for (Value v = lo; v <= hi; ++v) work(states[0], v);
        return states;
    }
    std::atomic<Value> next{lo};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (Value v = next.fetch_add(1); v <= hi; v = next.fetch_add(1)) work(states[t], v);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return states;
}

inline std::pair<Value, Value> half_box(const SystemSpec& spec, unsigned long P) {
    const auto p = static_cast<Value>(P);
    return spec.variant == Variant::signed_box ? std::pair{-p, p} : std::pair{Value{1}, p};
}

/// Whether every signature entry provably fits a signed 128-bit word with headroom.
inline bool fits_fast_path(const SystemSpec& spec, unsigned long P) {
    Integer bound = Integer(static_cast<long>(spec.half_length())) *
                    ipow(Integer(static_cast<unsigned long>(P)), (2 * spec.k - 1) * spec.d);
    return mpz_sizeinbase(bound.get_mpz_t(), 2) <= 124;
}

template <class Word>
Histogram<Word> build_histogram(const SystemSpec& spec, unsigned long P, unsigned threads) {
    const auto [lo, hi] = half_box(spec, P);
    const TupleScanner<Word> scanner(spec, lo, hi);
    auto states = run_partitioned<Histogram<Word>>(
        lo, hi, threads, [] { return Histogram<Word>{}; },
        [&](Histogram<Word>& h, Value first) {
            scanner.scan_first(first, [&](const Tuple&, const std::vector<Word>& sig, std::uint64_t ord) {
                auto& c = h[sig];
                c.tuples += ord;
                c.diagonal += ord * ord;
                c.members += 1;
            });
        });
    Histogram<Word> merged = std::move(states.front());
    for (std::size_t t = 1; t < states.size(); ++t)
        for (auto& [key, stats] : states[t]) merged[key].merge(stats);
    return merged;
}

template <class Word>
std::vector<Word> negated(const std::vector<Word>& key) {
    std::vector<Word> out(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) out[i] = -key[i];
    return out;
}

inline Integer to_integer(std::uint64_t v) {
    Integer r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return r;
}

inline std::uint64_t tuple_entries_estimate(const SystemSpec& spec, unsigned long P) {
    const auto [lo, hi] = half_box(spec, P);
    const auto width = static_cast<unsigned long>(hi - lo + 1);
    Integer count = binomial(width + spec.k, spec.half_length());
    return count.fits_ulong_p() ? count.get_ui() : ~std::uint64_t{0};
}

} // namespace detail

/// Estimated peak bytes for a histogram build; deterministic in (spec, P, threads).
inline std::uint64_t memory_estimate(const SystemSpec& spec, unsigned long P, unsigned threads) {
    const bool fast = detail::fits_fast_path(spec, P);
    const std::uint64_t per_entry = 96 + spec.k * (fast ? 16u : 48u);
    const std::uint64_t entries = detail::tuple_entries_estimate(spec, P);
    const std::uint64_t copies = threads > 1 ? 2 : 1;
    const long double bytes = static_cast<long double>(entries) * per_entry * copies;
    return bytes >= 1.8e19L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(bytes);
}

inline void check_budget(const SystemSpec& spec, unsigned long P, const CountOptions& opt) {
    const auto need = memory_estimate(spec, P, opt.threads);
    if (need > opt.memory_budget)
        throw BudgetError("memory estimate " + std::to_string(need) + " bytes exceeds budget " +
                              std::to_string(opt.memory_budget) + " for " + std::string(to_string(spec.variant)) +
                              " k=" + std::to_string(spec.k) + " d=" + std::to_string(spec.d) +
                              " P=" + std::to_string(P),
                          need, opt.memory_budget);
}

namespace detail {

template <class Word>
CountResult count_with(const SystemSpec& spec, unsigned long P, const CountOptions& opt) {
    const auto hist = build_histogram<Word>(spec, P, opt.threads);
    CountResult res;
    res.spec = spec;
    res.P = P;
    if (spec.variant == Variant::positive_box) {
        Integer V = 0, diag = 0, direct = 0;
        for (const auto& [key, c] : hist) {
            Integer n = to_integer(c.tuples);
            Integer sq = n * n;
            V += sq;
            diag += to_integer(c.diagonal);
            direct += sq - to_integer(c.diagonal);
        }
        res.V = V;
        res.L = exact_L_star(spec.k, P);
        ensure(diag == res.L, "diagonal pairs counted in the scan disagree with the closed form L*");
        res.delta = V - res.L;
        ensure(res.delta == direct, "direct non-trivial count disagrees with V - L*");
    } else {
        Integer cross = 0, square = 0;
        for (const auto& [key, c] : hist) {
            Integer n = to_integer(c.tuples);
            square += n * n;
            auto it = hist.find(negated(key));
            if (it != hist.end()) cross += n * to_integer(it->second.tuples);
        }
        ensure(cross == square, "sum N(s)N(-s) differs from sum N(s)^2");
        res.V = cross;
        res.L = exact_L_signed(spec.k, P);
        res.delta = res.V - res.L;
    }
    ensure(res.delta >= 0, "V < L");
    return res;
}

/// Members (sorted canonical tuples) of every signature class with at least two members.
template <class Word>
std::vector<std::pair<std::vector<Word>, std::vector<Tuple>>> colliding_classes(const SystemSpec& spec,
                                                                                unsigned long P,
                                                                                unsigned threads) {
    const auto hist = build_histogram<Word>(spec, P, threads);
    const auto [lo, hi] = half_box(spec, P);
    const TupleScanner<Word> scanner(spec, lo, hi);
    using Members = std::unordered_map<std::vector<Word>, std::vector<Tuple>, KeyHash<Word>>;
    auto states = run_partitioned<Members>(
        lo, hi, threads, [] { return Members{}; },
        [&](Members& m, Value first) {
            scanner.scan_first(first, [&](const Tuple& t, const std::vector<Word>& sig, std::uint64_t) {
                if (hist.at(sig).members >= 2) m[sig].push_back(t);
            });
        });
    Members merged;
    for (auto& s : states)
        for (auto& [key, tuples] : s) {
            auto& dst = merged[key];
            dst.insert(dst.end(), tuples.begin(), tuples.end());
        }
    std::vector<std::pair<std::vector<Word>, std::vector<Tuple>>> out;
    out.reserve(merged.size());
    for (auto& [key, tuples] : merged) {
        std::sort(tuples.begin(), tuples.end());
        out.emplace_back(key, std::move(tuples));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second.front() < b.second.front(); });
    return out;
}

inline Integer multiset_orderings(const Tuple& sorted) {
    Integer denom = 1;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    return factorial(sorted.size()) / denom;
}

template <class Word>
std::vector<SolutionPair> list_with(const SystemSpec& spec, unsigned long P, unsigned threads) {
    const auto classes = colliding_classes<Word>(spec, P, threads);
    std::vector<SolutionPair> out;
    if (spec.variant == Variant::positive_box) {
        for (const auto& [key, members] : classes)
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    SolutionPair s{spec, P, members[i], members[j], 0};
                    s.orderings = 2 * multiset_orderings(members[i]) * multiset_orderings(members[j]);
                    out.push_back(std::move(s));
                }
        std::sort(out.begin(), out.end(),
                  [](const SolutionPair& a, const SolutionPair& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
        return out;
    }

    std::unordered_map<std::vector<Word>, const std::vector<Tuple>*, KeyHash<Word>> by_key;
    for (const auto& [key, members] : classes) by_key.emplace(key, &members);
    std::set<Tuple> found;
    Tuple z;
    for (const auto& [key, members] : classes) {
        auto it = by_key.find(negated(key));
        if (it == by_key.end()) continue;
        for (const auto& a : members)
            for (const auto& b : *it->second) {
                z = a;
                z.insert(z.end(), b.begin(), b.end());
                std::sort(z.begin(), z.end());
                if (!is_trivial_signed(z, spec.k)) found.insert(z);
            }
    }
    for (const auto& t : found) {
        SolutionPair s{spec, P, t, {}, multiset_orderings(t)};
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace detail

/// Exact V, L and V - L for the box of size P.
inline CountResult count(const SystemSpec& spec, unsigned long P, const CountOptions& opt = {}) {
    spec.validate();
    require(P >= 1, "box size P must be >= 1");
    check_budget(spec, P, opt);
    const auto start = std::chrono::steady_clock::now();
    CountResult res = detail::fits_fast_path(spec, P) ? detail::count_with<detail::Int128>(spec, P, opt)
                                                      : detail::count_with<Integer>(spec, P, opt);
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

/*
 * Non-trivial solutions, one record per canonical class, sorted. Positive:
 * unordered pairs of distinct multisets with equal signature; orderings
 * counts both (x, y) and (y, x). Signed: sorted zero-signature tuples that
 * do not split into zero-sum pairs. Summing `orderings` over the full list
 * gives V - L. `limit` of zero means unlimited.
 */
inline std::vector<SolutionPair> list_nontrivial(const SystemSpec& spec, unsigned long P, std::size_t limit = 0,
                                                 const CountOptions& opt = {}) {
    spec.validate();
    require(P >= 1, "box size P must be >= 1");
    check_budget(spec, P, opt);
    auto out = detail::fits_fast_path(spec, P) ? detail::list_with<detail::Int128>(spec, P, opt.threads)
                                               : detail::list_with<Integer>(spec, P, opt.threads);
    if (limit != 0 && out.size() > limit) out.resize(limit);
    return out;
}

inline Value max_abs_entry(const SolutionPair& s) {
    Value m = 0;
    for (auto v : s.entries()) m = std::max(m, v < 0 ? -v : v);
    return m;
}

struct SmallestInstance {
    unsigned long P = 0;
    SolutionPair witness;
};

/// Smallest P <= P_cap admitting a non-trivial solution, with a witness.
inline std::optional<SmallestInstance> smallest_nontrivial(const SystemSpec& spec, unsigned long P_cap,
                                                           const CountOptions& opt = {}) {
    require(P_cap >= 1, "P_cap must be >= 1");
    const auto all = list_nontrivial(spec, P_cap, 0, opt);
    std::optional<SmallestInstance> best;
    for (const auto& s : all) {
        const auto m = static_cast<unsigned long>(max_abs_entry(s));
        if (!best || m < best->P) best = SmallestInstance{m, s};
    }
    if (best) best->witness.P = best->P;
    return best;
}

struct SurveyReport {
    SystemSpec spec;
    std::vector<unsigned long> ladder; // rungs actually computed
    std::vector<CountResult> counts;
    std::optional<std::string> stopped; // reason when the ladder was cut short
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<Rational> slope_rational;
    std::vector<double> residuals;
    std::size_t fit_points = 0;
};

/// Best rational approximation with denominator at most max_den.
inline Rational approximate_rational(double x, unsigned long max_den = 1000) {
    Rational target(x);
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    Rational rest = target;
    for (int iter = 0; iter < 64; ++iter) {
        Integer a = floor_of(rest);
        Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        Rational frac = rest - Rational(a);
        if (frac == 0) break;
        rest = 1 / frac;
    }
    Rational r(h1, k1);
    r.canonicalize();
    return r;
}

/// Least-squares slope of log(delta) against log(P) over rungs with delta > 0; needs three such rungs.
inline void fit_slope(SurveyReport& rep) {
    std::vector<double> xs, ys;
    for (const auto& c : rep.counts)
        if (c.delta > 0) {
            xs.push_back(std::log(static_cast<double>(c.P)));
            ys.push_back(std::log(c.delta.get_d()));
        }
    rep.fit_points = xs.size();
    rep.slope.reset();
    rep.intercept.reset();
    rep.slope_rational.reset();
    rep.residuals.clear();
    if (xs.size() < 3) return;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    rep.slope = slope;
    rep.intercept = icept;
    rep.slope_rational = approximate_rational(slope);
    for (std::size_t i = 0; i < xs.size(); ++i) rep.residuals.push_back(ys[i] - (icept + slope * xs[i]));
}

/*
 * Counts every rung of a strictly increasing ladder, stopping at the first
 * budget refusal, then fits the slope. `count_rung` defaults to count().
 */
inline SurveyReport survey(const SystemSpec& spec, const std::vector<unsigned long>& ladder,
                           const CountOptions& opt = {},
                           const std::function<CountResult(unsigned long)>& count_rung = {}) {
    spec.validate();
    require(!ladder.empty(), "survey ladder is empty");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        require(ladder[i] > ladder[i - 1], "survey ladder must be strictly increasing");

    SurveyReport rep;
    rep.spec = spec;
    for (auto P : ladder) {
        try {
            rep.counts.push_back(count_rung ? count_rung(P) : count(spec, P, opt));
            rep.ladder.push_back(P);
        } catch (const BudgetError& e) {
            rep.stopped = e.what();
            break;
        }
    }
    fit_slope(rep);
    return rep;
}

} // namespace paucity
