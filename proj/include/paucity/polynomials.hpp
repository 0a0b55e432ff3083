#pragma once

// Sparse multivariate polynomials with exact integer coefficients, and the
// integer relation among odd power sums of k-1 variables (Upsilon).

#include "paucity/core.hpp"
#include "paucity/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace paucity {

using Exponents = std::vector<unsigned>;

inline unsigned total_degree(const Exponents& e) {
    unsigned s = 0;
    for (auto x : e) s += x;
    return s;
}

/// Graded lexicographic order, largest first: total degree, then lex.
struct GradedLexGreater {
    bool operator()(const Exponents& a, const Exponents& b) const {
        const unsigned da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        return a > b;
    }
};

class SparsePoly {
public:
    using TermMap = std::map<Exponents, Integer, GradedLexGreater>;

    explicit SparsePoly(std::size_t nvars = 0) : nvars_(nvars) {}

    static SparsePoly constant(std::size_t nvars, const Integer& c) {
        SparsePoly p(nvars);
        p.add_term(Exponents(nvars, 0), c);
        return p;
    }

    /// The variable with zero-based index `i`.
    static SparsePoly variable(std::size_t nvars, std::size_t i) {
        require(i < nvars, "variable index out of range");
        Exponents e(nvars, 0);
        e[i] = 1;
        SparsePoly p(nvars);
        p.add_term(e, 1);
        return p;
    }

    static SparsePoly monomial(Exponents e, const Integer& c) {
        SparsePoly p(e.size());
        p.add_term(e, c);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
    }

    Integer constant_term() const { return coefficient(Exponents(nvars_, 0)); }

    Integer coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Integer(0) : it->second;
    }

    /// Leading term in graded-lex order. Precondition: nonzero.
    const TermMap::value_type& leading_term() const {
        require(!terms_.empty(), "leading term of the zero polynomial");
        return *terms_.begin();
    }

    void add_term(const Exponents& e, const Integer& c) {
        require(e.size() == nvars_, "exponent vector length does not match nvars");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Integer content() const {
        Integer g = 0;
        for (const auto& [e, c] : terms_) g = gcd(g, c);
        return g;
    }

    SparsePoly& operator+=(const SparsePoly& o) {
        check_compatible(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    SparsePoly& operator-=(const SparsePoly& o) {
        check_compatible(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    SparsePoly& operator*=(const Integer& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
    friend SparsePoly operator*(SparsePoly a, const Integer& s) { return a *= s; }
    friend SparsePoly operator-(SparsePoly a) { return a *= Integer(-1); }

    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
        a.check_compatible(b);
        SparsePoly out(a.nvars_);
        Exponents e(a.nvars_);
        Integer prod;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                prod = ca * cb;
                out.add_term(e, prod);
            }
        return out;
    }

    friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    SparsePoly pow(unsigned n) const {
        SparsePoly result = constant(nvars_, 1);
        SparsePoly base = *this;
        while (n > 0) {
            if (n & 1u) result = result * base;
            n >>= 1;
            if (n > 0) base = base * base;
        }
        return result;
    }

    Integer eval(std::span<const Integer> point) const {
        require(point.size() == nvars_, "evaluation point length does not match nvars");
        Integer sum = 0, term;
        for (const auto& [e, c] : terms_) {
            term = c;
            for (std::size_t i = 0; i < nvars_; ++i)
                if (e[i] != 0) term *= ipow(point[i], e[i]);
            sum += term;
        }
        return sum;
    }

    /// Substitutes subs[i] for variable i. All substitutes share one ring.
    SparsePoly compose(std::span<const SparsePoly> subs) const {
        require(subs.size() == nvars_, "substitution count does not match nvars");
        require(!subs.empty(), "cannot compose a polynomial in zero variables");
        const std::size_t target = subs.front().nvars();
        for (const auto& s : subs) require(s.nvars() == target, "substitutes live in different rings");

        std::vector<std::vector<SparsePoly>> powers(nvars_);
        auto power = [&](std::size_t i, unsigned n) -> const SparsePoly& {
            auto& cache = powers[i];
            if (cache.empty()) cache.push_back(constant(target, 1));
            while (cache.size() <= n) cache.push_back(cache.back() * subs[i]);
            return cache[n];
        };

        SparsePoly out(target);
        for (const auto& [e, c] : terms_) {
            SparsePoly term = constant(target, c);
            for (std::size_t i = 0; i < nvars_; ++i)
                if (e[i] != 0) term = term * power(i, e[i]);
            out += term;
        }
        return out;
    }

private:
    void check_compatible(const SparsePoly& o) const {
        require(nvars_ == o.nvars_, "variable-count mismatch: " + std::to_string(nvars_) + " vs " +
                                        std::to_string(o.nvars_));
    }

    std::size_t nvars_;
    TermMap terms_;
};

enum class PolyOp { add, sub, mul };

inline SparsePoly poly_arith(const SparsePoly& a, const SparsePoly& b, PolyOp op) {
    switch (op) {
    case PolyOp::add: return a + b;
    case PolyOp::sub: return a - b;
    case PolyOp::mul: return a * b;
    }
    throw PreconditionError("unknown polynomial operation");
}

inline Integer poly_eval(const SparsePoly& p, std::span<const Integer> point) { return p.eval(point); }

/// Exact quotient p / d, or nullopt when d does not divide p in Z[x].
inline std::optional<SparsePoly> divide_exact(const SparsePoly& p, const SparsePoly& d) {
    require(p.nvars() == d.nvars(), "variable-count mismatch");
    require(!d.is_zero(), "division by the zero polynomial");
    const auto& [de, dc] = d.leading_term();
    SparsePoly rem = p;
    SparsePoly quot(p.nvars());
    Exponents shift(p.nvars());
    while (!rem.is_zero()) {
        const auto& [re, rc] = rem.leading_term();
        for (std::size_t i = 0; i < shift.size(); ++i) {
            if (re[i] < de[i]) return std::nullopt;
            shift[i] = re[i] - de[i];
        }
        if (!mpz_divisible_p(rc.get_mpz_t(), dc.get_mpz_t())) return std::nullopt;
        Integer qc;
        mpz_divexact(qc.get_mpz_t(), rc.get_mpz_t(), dc.get_mpz_t());
        SparsePoly step = SparsePoly::monomial(shift, qc);
        quot += step;
        rem -= step * d;
    }
    return quot;
}

/// [p_1..p_k] with p_j = sum_{i<nvars} x_i^{(2j-1)d}.
inline std::vector<SparsePoly> power_sum_polys(unsigned k, std::size_t nvars, unsigned d = 1) {
    require(k >= 1, "power sums need k >= 1");
    require(nvars >= 1, "power sums need at least one variable");
    require(d >= 1, "inner exponent d must be positive");
    std::vector<SparsePoly> out;
    for (unsigned j = 1; j <= k; ++j) {
        SparsePoly p(nvars);
        for (std::size_t i = 0; i < nvars; ++i) {
            Exponents e(nvars, 0);
            e[i] = (2 * j - 1) * d;
            p.add_term(e, 1);
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct WeightedMonomialBasis {
    unsigned k = 0;
    std::vector<Exponents> monomials; // graded-lex, largest first

    unsigned weight() const { return k * (k + 1) / 2; }
};

inline unsigned weighted_degree(const Exponents& e) {
    unsigned s = 0;
    for (std::size_t i = 0; i < e.size(); ++i) s += static_cast<unsigned>(2 * i + 1) * e[i];
    return s;
}

/// Every exponent vector with sum (2i-1) alpha_i = k(k+1)/2.
inline WeightedMonomialBasis weighted_basis(unsigned k) {
    require(k >= 2, "weighted basis needs k >= 2");
    WeightedMonomialBasis basis{k, {}};
    const unsigned target = basis.weight();
    Exponents cur(k, 0);
    auto rec = [&](auto&& self, std::size_t idx, unsigned remaining) -> void {
        if (idx == 0) {
            cur[0] = remaining; // weight of w_1 is one
            basis.monomials.push_back(cur);
            return;
        }
        const unsigned w = static_cast<unsigned>(2 * idx + 1);
        for (unsigned a = 0; a * w <= remaining; ++a) {
            cur[idx] = a;
            self(self, idx - 1, remaining - a * w);
        }
        cur[idx] = 0;
    };
    rec(rec, k - 1, target);
    std::sort(basis.monomials.begin(), basis.monomials.end(), GradedLexGreater{});
    return basis;
}

inline constexpr unsigned upsilon_max_k = 6;
inline constexpr unsigned identity_max_k = 4;

struct UpsilonResult {
    SparsePoly poly;
    std::size_t basis_size = 0;
    std::size_t nullspace_dim = 0;
    std::size_t samples = 0;
    unsigned draws = 0;
};

/*
 * Finds the integer relation among t_1..t_k (odd power sums of k-1
 * variables). The coefficient vector over the weighted basis is the
 * nullspace of a matrix of sample evaluations; sample points live in
 * [-20, 20]^(k-1) and are redrawn while the sampled nullspace is larger
 * than one. The result is certified by symbolic substitution.
 *
 * Normalised to content one with a positive leading coefficient.
 */
inline UpsilonResult construct_upsilon(unsigned k, std::uint64_t seed = 0) {
    require(k >= 2 && k <= upsilon_max_k,
            "Upsilon is supported for 2 <= k <= " + std::to_string(upsilon_max_k));
    const auto basis = weighted_basis(k);
    const std::size_t n = basis.monomials.size();
    const std::size_t nvars = k - 1;
    const std::size_t samples = 3 * n;
    constexpr unsigned max_draws = 8;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> coord(-20, 20);

    IntMatrix null;
    unsigned draw = 0;
    for (; draw < max_draws; ++draw) {
        IntMatrix m;
        m.reserve(samples);
        std::vector<Integer> t(k);
        for (std::size_t s = 0; s < samples; ++s) {
            std::vector<long> x(nvars);
            for (auto& v : x) v = coord(rng);
            for (unsigned j = 1; j <= k; ++j) {
                t[j - 1] = 0;
                for (auto v : x) t[j - 1] += ipow(v, 2 * j - 1);
            }
            IntVector row(n);
            for (std::size_t b = 0; b < n; ++b) {
                Integer val = 1;
                for (unsigned j = 0; j < k; ++j)
                    if (basis.monomials[b][j] != 0) val *= ipow(t[j], basis.monomials[b][j]);
                row[b] = std::move(val);
            }
            m.push_back(std::move(row));
        }
        null = integer_nullspace(m, n);
        if (null.size() <= 1) break;
    }
    ensure(!null.empty(), "sampled nullspace is empty for k=" + std::to_string(k));
    ensure(null.size() == 1, "Upsilon nullspace has dimension " + std::to_string(null.size()) +
                                 " for k=" + std::to_string(k) + " after " + std::to_string(max_draws) +
                                 " draws");

    SparsePoly poly(k);
    for (std::size_t b = 0; b < n; ++b) poly.add_term(basis.monomials[b], null.front()[b]);
    if (poly.leading_term().second < 0) poly *= Integer(-1);

    const auto t = power_sum_polys(k, nvars);
    ensure(poly.compose(t).is_zero(), "Upsilon(t_1..t_k) is not identically zero for k=" + std::to_string(k));

    return UpsilonResult{std::move(poly), n, null.size(), samples, draw + 1};
}

inline SparsePoly upsilon(unsigned k, std::uint64_t seed = 0) { return construct_upsilon(k, seed).poly; }

inline SparsePoly pairwise_sum_product(std::size_t nvars) {
    SparsePoly prod = SparsePoly::constant(nvars, 1);
    for (std::size_t i = 0; i < nvars; ++i)
        for (std::size_t j = i + 1; j < nvars; ++j)
            prod = prod * (SparsePoly::variable(nvars, i) + SparsePoly::variable(nvars, j));
    return prod;
}

inline constexpr std::string_view upsilon_normalization =
    "primitive, positive graded-lex leading coefficient";

/*
 * Expands Upsilon(tau_1..tau_k) in k+1 variables and divides it, one linear
 * factor at a time, by prod_{i<j}(x_i + x_j). The quotient must be a
 * nonzero constant, which is returned.
 */
inline Integer factor_identity_constant(unsigned k, const SparsePoly& ups) {
    require(ups.nvars() == k, "Upsilon must have k variables");
    const std::size_t nvars = k + 1;
    SparsePoly rest = ups.compose(power_sum_polys(k, nvars));
    for (std::size_t i = 0; i < nvars; ++i)
        for (std::size_t j = i + 1; j < nvars; ++j) {
            auto q = divide_exact(rest, SparsePoly::variable(nvars, i) + SparsePoly::variable(nvars, j));
            ensure(q.has_value(), "Upsilon(tau) is not divisible by (x_" + std::to_string(i + 1) + " + x_" +
                                      std::to_string(j + 1) + ")");
            rest = std::move(*q);
        }
    ensure(rest.is_constant(), "quotient Upsilon(tau) / prod(x_i + x_j) is not constant");
    Integer c = rest.constant_term();
    ensure(c != 0, "identity constant is zero");
    return c;
}

inline Integer factor_identity_constant(unsigned k) { return factor_identity_constant(k, upsilon(k)); }

// Serialization ------------------------------------------------------------

/// Line 1: nvars; then one line per term: exponents, then coefficient.
inline std::string to_text(const SparsePoly& p) {
    std::ostringstream os;
    os << p.nvars() << '\n';
    for (const auto& [e, c] : p.terms()) {
        for (auto x : e) os << x << ' ';
        os << c.get_str() << '\n';
    }
    return os.str();
}

inline SparsePoly from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "empty polynomial record");
    std::size_t nvars = 0;
    {
        std::istringstream ls(line);
        require(static_cast<bool>(ls >> nvars), "malformed nvars line: '" + line + "'");
    }
    SparsePoly p(nvars);
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<std::string> fields;
        for (std::string f; ls >> f;) fields.push_back(f);
        require(fields.size() == nvars + 1, "term line has wrong field count: '" + line + "'");
        Exponents e(nvars);
        for (std::size_t i = 0; i < nvars; ++i) {
            Integer v = parse_integer(fields[i]);
            require(v >= 0 && v.fits_uint_p(), "bad exponent in '" + line + "'");
            e[i] = static_cast<unsigned>(v.get_ui());
        }
        Integer c = parse_integer(fields.back());
        require(c != 0, "zero coefficient stored in '" + line + "'");
        require(p.coefficient(e) == 0, "duplicate term in '" + line + "'");
        p.add_term(e, c);
    }
    return p;
}

inline nlohmann::json to_json(const SparsePoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back(nlohmann::json::array({e, c.get_str()}));
    return {{"nvars", p.nvars()}, {"terms", terms}};
}

inline SparsePoly poly_from_json(const nlohmann::json& j) {
    SparsePoly p(j.at("nvars").get<std::size_t>());
    for (const auto& term : j.at("terms")) {
        auto e = term.at(0).get<Exponents>();
        p.add_term(e, parse_integer(term.at(1).get<std::string>()));
    }
    return p;
}

/// Human-readable rendering such as "w1^3 - w2".
inline std::string pretty(const SparsePoly& p, std::string_view var = "w") {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        Integer mag = abs(c);
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
        bool monic = total_degree(e) != 0 && mag == 1;
        if (!monic) os << mag.get_str();
        bool need_star = !monic;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (need_star) os << '*';
            os << var << (i + 1);
            if (e[i] > 1) os << '^' << e[i];
            need_star = true;
        }
        first = false;
    }
    return os.str();
}

} // namespace paucity
