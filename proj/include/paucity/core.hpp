#pragma once

// Exact arithmetic vocabulary shared by every paucity module.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paucity {

inline constexpr std::string_view tool_version = "0.3.1";

using Integer = mpz_class;
using Rational = mpq_class;

/// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A checked mathematical invariant failed. Always a bug in this library.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A computation was refused because its resource estimate exceeds the budget.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : std::runtime_error(what), required_(required), budget_(budget) {}

    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

/// Persisted data disagrees with itself.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError(what);
}

inline void ensure(bool ok, const std::string& what) {
    if (!ok) throw InvariantError(what);
}

inline Integer ipow(const Integer& base, unsigned long exp) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline Integer ipow(long base, unsigned long exp) { return ipow(Integer(base), exp); }

inline Rational rpow(const Rational& base, unsigned long exp) {
    Rational r(ipow(base.get_num(), exp), ipow(base.get_den(), exp));
    r.canonicalize();
    return r;
}

inline Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline Integer isqrt(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Integer& n) {
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Integer floor_of(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline std::string to_string(const Integer& x) { return x.get_str(); }

/// "p/q", or just "p" when the denominator is one.
inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer parse_integer(std::string_view text) {
    Integer r;
    if (text.empty() || r.set_str(std::string(text), 10) != 0)
        throw PreconditionError("not a decimal integer: '" + std::string(text) + "'");
    return r;
}

/// Accepts "p", "p/q" or a terminating decimal such as "2.5".
inline Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer den = parse_integer(text.substr(slash + 1));
        require(den != 0, "zero denominator in '" + std::string(text) + "'");
        Rational q(parse_integer(text.substr(0, slash)), den);
        q.canonicalize();
        return q;
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string frac(text.substr(dot + 1));
        bool negative = !digits.empty() && digits[0] == '-';
        Integer whole = digits.empty() || digits == "-" ? Integer(0) : parse_integer(digits);
        Integer num = frac.empty() ? Integer(0) : parse_integer(frac);
        require(num >= 0, "malformed decimal '" + std::string(text) + "'");
        Integer scale = ipow(10, frac.size());
        Rational q(abs(whole) * scale + num, scale);
        q.canonicalize();
        return negative ? Rational(-q) : q;
    }
    return Rational(parse_integer(text));
}

struct IntegerHash {
    std::size_t operator()(const Integer& x) const noexcept {
        std::size_t h = static_cast<std::size_t>(mpz_sgn(x.get_mpz_t()) + 1);
        const std::size_t limbs = mpz_size(x.get_mpz_t());
        for (std::size_t i = 0; i < limbs; ++i)
            h = h * 0x9E3779B97F4A7C15ull + static_cast<std::size_t>(mpz_getlimbn(x.get_mpz_t(), i));
        return h;
    }
};

} // namespace paucity
