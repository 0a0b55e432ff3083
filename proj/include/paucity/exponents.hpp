#pragma once

// Exact paucity exponents and the discrete AM-GM inequality.
//
// Every comparison against a square root is made by squaring both sides
// after checking signs, so nothing here touches floating point.

#include "paucity/core.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace paucity {

struct PsiCheck {
    unsigned r = 0;
    Integer psi;       // sum_{i=1}^{kappa-1} i^(r-1)
    Integer kappa_pow; // kappa^r
    bool holds = false; // r * psi < kappa^r
};

struct ExponentReport {
    unsigned k = 0;
    unsigned d = 1;
    Rational value;
    std::vector<unsigned> argmin;
    Rational bound_lhs; // (value + d)^2
    Integer bound_rhs;  // 8d(k+1) + 1
    bool bound_holds = false;
    bool bound_equality = false;
    std::vector<PsiCheck> psi_checks; // only for the refined exponent
};

namespace detail {

template <class Term>
ExponentReport minimise_over_r(unsigned k, unsigned d, Term term) {
    ExponentReport rep;
    rep.k = k;
    rep.d = d;
    for (unsigned r = 2; r <= 2 * k + 1; ++r) {
        const Rational v = term(r);
        if (rep.argmin.empty() || v < rep.value) {
            rep.value = v;
            rep.argmin = {r};
        } else if (v == rep.value) {
            rep.argmin.push_back(r);
        }
    }
    const Rational shifted = rep.value + Rational(d);
    ensure(shifted > 0, "exponent plus d must be positive");
    rep.bound_lhs = shifted * shifted;
    rep.bound_rhs = Integer(8) * d * (k + 1) + 1;
    rep.bound_holds = rep.bound_lhs <= Rational(rep.bound_rhs);
    rep.bound_equality = rep.bound_lhs == Rational(rep.bound_rhs);
    return rep;
}

} // namespace detail

/// min over 2 <= r <= 2k+1 of r - d + (2k+2)d/r, checked against sqrt(8d(k+1)+1) - d.
inline ExponentReport alpha_kd(unsigned k, unsigned d) {
    require(k >= 2, "alpha needs k >= 2");
    require(d >= 1, "alpha needs d >= 1");
    return detail::minimise_over_r(k, d, [&](unsigned r) -> Rational {
        Rational frac(Integer(2 * k + 2) * d, Integer(r));
        frac.canonicalize();
        return Rational(static_cast<long>(r) - static_cast<long>(d)) + frac;
    });
}

/// min over 2 <= r <= 2k+1 of r - 1 + (2k+2)/r, checked against sqrt(8k+9) - 1.
inline ExponentReport alpha_k(unsigned k) { return alpha_kd(k, 1); }

inline Integer psi_sum(unsigned kappa, unsigned r) {
    Integer s = 0;
    for (unsigned i = 1; i + 1 <= kappa; ++i) s += ipow(Integer(i), r - 1);
    return s;
}

/// min over r of r + psi(kappa) / kappa^(r-1), kappa = 2k+2-r.
inline ExponentReport beta_k(unsigned k) {
    require(k >= 2, "beta needs k >= 2");
    auto rep = detail::minimise_over_r(k, 1, [&](unsigned r) -> Rational {
        const unsigned kappa = 2 * k + 2 - r;
        Rational frac(psi_sum(kappa, r), ipow(Integer(kappa), r - 1));
        frac.canonicalize();
        return Rational(r) + frac;
    });
    for (unsigned r = 2; r <= 2 * k + 1; ++r) {
        const unsigned kappa = 2 * k + 2 - r;
        PsiCheck c{r, psi_sum(kappa, r), ipow(Integer(kappa), r), false};
        c.holds = Integer(r) * c.psi < c.kappa_pow;
        rep.psi_checks.push_back(std::move(c));
    }
    return rep;
}

struct DiscreteMin {
    Rational lambda;
    std::vector<Integer> argmin;
    Rational value;        // min of r + lambda/r
    Rational value_sq;
    Rational bound_sq;     // 4 lambda + 1
    bool bound_holds = false;
    bool equality = false; // value^2 == 4 lambda + 1
    bool pronic = false;   // lambda = m(m-1) for an integer m >= 1
};

inline bool is_pronic(const Rational& lambda) {
    if (lambda.get_den() != 1 || lambda <= 0) return false;
    const Integer disc = 4 * lambda.get_num() + 1;
    return is_perfect_square(disc);
}

namespace detail {

inline DiscreteMin minimise_discrete(const Rational& lambda, const std::vector<Integer>& candidates) {
    DiscreteMin out;
    out.lambda = lambda;
    for (const auto& r : candidates) {
        const Rational v = Rational(r) + lambda / Rational(r);
        if (out.argmin.empty() || v < out.value) {
            out.value = v;
            out.argmin = {r};
        } else if (v == out.value && std::find(out.argmin.begin(), out.argmin.end(), r) == out.argmin.end()) {
            out.argmin.push_back(r);
        }
    }
    std::sort(out.argmin.begin(), out.argmin.end());
    out.value_sq = out.value * out.value;
    out.bound_sq = 4 * lambda + 1;
    out.bound_holds = out.value_sq <= out.bound_sq;
    out.equality = out.value_sq == out.bound_sq;
    out.pronic = is_pronic(lambda);
    return out;
}

/// r in [max(1, floor(sqrt(lambda)) - 1), floor(sqrt(lambda)) + 2].
inline std::vector<Integer> sqrt_window(const Rational& lambda) {
    const Integer s = isqrt(floor_of(lambda));
    std::vector<Integer> out;
    for (Integer r = std::max(Integer(1), Integer(s - 1)); r <= s + 2; ++r) out.push_back(r);
    return out;
}

} // namespace detail

/// min over positive integers r of r + lambda/r. Convexity confines the search to a window around sqrt(lambda).
inline DiscreteMin discrete_min(const Rational& lambda) {
    require(lambda > 0, "lambda must be positive");
    return detail::minimise_discrete(lambda, detail::sqrt_window(lambda));
}

/// As discrete_min, restricted to lo <= r <= hi.
inline DiscreteMin discrete_min_restricted(const Rational& lambda, const Integer& lo, const Integer& hi) {
    require(lambda > 0, "lambda must be positive");
    require(lo >= 1 && lo <= hi, "restriction needs 1 <= lo <= hi");
    std::vector<Integer> cand{lo, hi};
    for (const auto& r : detail::sqrt_window(lambda))
        if (r >= lo && r <= hi) cand.push_back(r);
    return detail::minimise_discrete(lambda, cand);
}

struct PaucityRange {
    unsigned k = 0;
    unsigned long d_max = 0;     // largest d with 8d'(k+1)+1 < (k+1+d')^2 for all d' <= d
    unsigned long beta_floor = 0; // floor((3 - 2 sqrt 2)(k - 1))
};

/// floor((3 - 2 sqrt 2) n), from 8 n^2 <= (3n - d)^2 with 3n - d >= 0.
inline unsigned long floor_beta_times(unsigned long n) {
    unsigned long d = 0;
    auto fits = [n](unsigned long c) {
        const Integer lhs = 8 * Integer(n) * Integer(n);
        const Integer gap = 3 * Integer(n) - Integer(c);
        return gap >= 0 && lhs <= gap * gap;
    };
    while (fits(d + 1)) ++d;
    return d;
}

inline PaucityRange paucity_range_d(unsigned k) {
    require(k >= 2, "paucity range needs k >= 2");
    PaucityRange out;
    out.k = k;
    auto certified = [k](unsigned long d) {
        const Integer lhs = Integer(8) * Integer(d) * Integer(k + 1) + 1;
        const Integer side = Integer(k + 1) + Integer(d);
        return lhs < side * side;
    };
    while (certified(out.d_max + 1)) ++out.d_max;
    out.beta_floor = floor_beta_times(k - 1);
    ensure(out.beta_floor <= out.d_max, "a d <= beta(k-1) is not certified for k=" + std::to_string(k));
    return out;
}

inline std::string join(const std::vector<unsigned>& xs, char sep = ' ') {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(xs[i]);
    }
    return s;
}

} // namespace paucity
