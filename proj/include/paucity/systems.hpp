#pragma once

// The odd power sum systems, their signatures, triviality tests and exact
// diagonal counts.

#include "paucity/core.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace paucity {

using Value = std::int64_t;
using Tuple = std::vector<Value>;

enum class Variant {
    signed_box,   // sum_{i<=2k+2} z_i^(2j-1) = 0 with |z_i| <= P
    positive_box, // x and y (k+1)-tuples in [1, P] with equal power sums
};

inline std::string_view to_string(Variant v) {
    return v == Variant::signed_box ? "signed" : "positive";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "signed") return Variant::signed_box;
    if (s == "positive") return Variant::positive_box;
    throw PreconditionError("unknown variant '" + std::string(s) + "' (expected signed|positive)");
}

struct SystemSpec {
    unsigned k = 2;
    unsigned d = 1;
    Variant variant = Variant::positive_box;

    void validate() const {
        require(k >= 2, "system needs k >= 2");
        require(d >= 1, "inner exponent d must be >= 1");
        require(variant == Variant::positive_box || d == 1, "the signed variant is defined only for d = 1");
    }

    unsigned half_length() const { return k + 1; }
    unsigned full_length() const { return 2 * k + 2; }

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

using Signature = std::vector<Integer>;

/// Entry j is sum_i tuple_i^((2j-1)d).
inline Signature signature(std::span<const Value> tuple, const SystemSpec& spec) {
    spec.validate();
    Signature s(spec.k, Integer(0));
    for (auto v : tuple) {
        const Integer base(static_cast<long>(v));
        for (unsigned j = 1; j <= spec.k; ++j) s[j - 1] += ipow(base, (2 * j - 1) * spec.d);
    }
    return s;
}

/// True iff x is a permutation of y.
inline bool is_trivial_positive(std::span<const Value> x, std::span<const Value> y) {
    require(x.size() == y.size(), "tuples differ in length");
    Tuple a(x.begin(), x.end()), b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

/// True iff z splits into zero-sum pairs: mult(v) = mult(-v) and mult(0) even.
inline bool is_trivial_signed(std::span<const Value> z, unsigned k) {
    require(z.size() == 2 * static_cast<std::size_t>(k) + 2,
            "signed tuple must have length 2k+2 = " + std::to_string(2 * k + 2));
    std::map<Value, long> mult;
    for (auto v : z) mult[v] += 1;
    for (const auto& [v, m] : mult) {
        if (v == 0) {
            if (m % 2 != 0) return false;
        } else if (v > 0) {
            auto it = mult.find(-v);
            if (it == mult.end() || it->second != m) return false;
        } else if (mult.find(-v) == mult.end()) {
            return false;
        }
    }
    return true;
}

/// Number of linear spaces z_a + z_b = 0 covering the trivial solutions.
inline Integer count_linear_spaces(unsigned k) {
    require(k >= 1, "k must be >= 1");
    Integer odd_product = 1;
    for (unsigned j = 1; j <= k + 1; ++j) odd_product *= 2 * j - 1;
    Integer pairing = factorial(2 * k + 2) / factorial(k + 1);
    pairing >>= (k + 1);
    ensure(pairing == odd_product, "linear space count formulas disagree for k=" + std::to_string(k));
    return odd_product;
}

namespace detail {

/// Coefficients [x^0..x^n] of (sum_t x^t/(t!)^2)^P, exact.
inline std::vector<Rational> pair_egf_power(unsigned n, unsigned long P) {
    std::vector<Rational> base(n + 1);
    for (unsigned t = 0; t <= n; ++t) {
        Integer f = factorial(t);
        base[t] = Rational(Integer(1), f * f);
    }
    auto mul = [n](const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> c(n + 1, Rational(0));
        for (unsigned i = 0; i <= n; ++i) {
            if (a[i] == 0) continue;
            for (unsigned j = 0; i + j <= n; ++j) c[i + j] += a[i] * b[j];
        }
        return c;
    };
    std::vector<Rational> result(n + 1, Rational(0));
    result[0] = 1;
    while (P > 0) {
        if (P & 1ul) result = mul(result, base);
        P >>= 1;
        if (P > 0) base = mul(base, base);
    }
    return result;
}

inline Integer to_exact_integer(const Rational& q, std::string_view what) {
    ensure(q.get_den() == 1, std::string(what) + " is not an integer: " + to_string(q));
    return q.get_num();
}

} // namespace detail

/// Exact count of pairs in [1,P]^(k+1) x [1,P]^(k+1) whose multisets agree.
inline Integer exact_L_star(unsigned k, unsigned long P) {
    require(k >= 1 && P >= 1, "exact_L_star needs k >= 1 and P >= 1");
    const unsigned n = k + 1;
    auto coeff = detail::pair_egf_power(n, P);
    Integer nf = factorial(n);
    return detail::to_exact_integer(coeff[n] * Rational(nf * nf), "L*");
}

/// Exact count of z in [-P,P]^(2k+2) that split into zero-sum pairs.
inline Integer exact_L_signed(unsigned k, unsigned long P) {
    require(k >= 1 && P >= 1, "exact_L_signed needs k >= 1 and P >= 1");
    const unsigned n = 2 * k + 2;
    auto coeff = detail::pair_egf_power(k + 1, P);
    Rational total = 0;
    const Integer nf = factorial(n);
    for (unsigned zeros = 0; zeros <= n; zeros += 2)
        total += Rational(nf / factorial(zeros)) * coeff[(n - zeros) / 2];
    return detail::to_exact_integer(total, "L");
}

/*
 * A solution record. Positive variant: x and y are the two (k+1)-tuples.
 * Signed variant: z is the full (2k+2)-tuple and y is empty.
 * `orderings` is the number of ordered solutions this canonical record
 * stands for.
 */
struct SolutionPair {
    SystemSpec spec;
    unsigned long P = 0;
    Tuple x;
    Tuple y;
    Integer orderings = 1;

    Tuple entries() const {
        Tuple all = x;
        all.insert(all.end(), y.begin(), y.end());
        return all;
    }

    /// Signed embedding: x followed by -y (identity for signed records).
    Tuple as_signed() const {
        Tuple all = x;
        for (auto v : y) all.push_back(-v);
        return all;
    }

    friend bool operator==(const SolutionPair&, const SolutionPair&) = default;
};

inline std::string csv_header(const SystemSpec& spec) {
    std::ostringstream os;
    os << "variant,k,d,P";
    for (unsigned i = 1; i <= spec.full_length(); ++i) os << ",v" << i;
    return os.str();
}

/// variant,k,d,P,entries... Signatures are never stored.
inline std::string to_csv_row(const SolutionPair& s) {
    std::ostringstream os;
    os << to_string(s.spec.variant) << ',' << s.spec.k << ',' << s.spec.d << ',' << s.P;
    for (auto v : s.entries()) os << ',' << v;
    return os.str();
}

inline SolutionPair parse_csv_row(std::string_view row) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : row) {
        if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else if (c != '\r' && c != ' ') {
            cur.push_back(c);
        }
    }
    f.push_back(cur);
    require(f.size() >= 4, "solution row has too few fields");
    SolutionPair s;
    s.spec.variant = parse_variant(f[0]);
    s.spec.k = static_cast<unsigned>(parse_integer(f[1]).get_ui());
    s.spec.d = static_cast<unsigned>(parse_integer(f[2]).get_ui());
    s.P = parse_integer(f[3]).get_ui();
    s.spec.validate();
    require(f.size() == 4 + s.spec.full_length(), "solution row has wrong entry count");
    Tuple all;
    for (std::size_t i = 4; i < f.size(); ++i) all.push_back(parse_integer(f[i]).get_si());
    if (s.spec.variant == Variant::positive_box) {
        s.x.assign(all.begin(), all.begin() + s.spec.half_length());
        s.y.assign(all.begin() + s.spec.half_length(), all.end());
    } else {
        s.x = std::move(all);
    }
    return s;
}

/// Checks signature equality (positive) or vanishing (signed).
inline bool is_solution(const SolutionPair& s) {
    if (s.spec.variant == Variant::positive_box) return signature(s.x, s.spec) == signature(s.y, s.spec);
    const auto sig = signature(s.x, s.spec);
    return std::all_of(sig.begin(), sig.end(), [](const Integer& v) { return v == 0; });
}

} // namespace paucity
