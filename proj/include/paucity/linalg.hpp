#pragma once

// Fraction-free (Bareiss) elimination over the integers and exact nullspaces.

#include "paucity/core.hpp"

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace paucity {

using IntVector = std::vector<Integer>;
using IntMatrix = std::vector<IntVector>;

struct EchelonForm {
    IntMatrix rows;                  // row echelon form, rank rows are meaningful
    std::vector<std::size_t> pivots; // pivot column of each nonzero row
    std::size_t cols = 0;

    std::size_t rank() const { return pivots.size(); }
};

/*
 * Bareiss elimination on a rectangular matrix. Every entry produced is a
 * minor of the input, so each division by the previous pivot is exact.
 * Columns without a pivot are skipped and leave the divisor unchanged.
 */
inline EchelonForm bareiss_echelon(IntMatrix m) {
    EchelonForm out;
    const std::size_t nrows = m.size();
    const std::size_t ncols = nrows == 0 ? 0 : m.front().size();
    for (const auto& row : m) require(row.size() == ncols, "ragged matrix");
    out.cols = ncols;

    Integer prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < nrows; ++c) {
        std::size_t pivot = r;
        while (pivot < nrows && m[pivot][c] == 0) ++pivot;
        if (pivot == nrows) continue;
        std::swap(m[r], m[pivot]);

        const Integer& p = m[r][c];
        for (std::size_t i = r + 1; i < nrows; ++i) {
            for (std::size_t j = c + 1; j < ncols; ++j) {
                Integer v = m[i][j] * p - m[i][c] * m[r][j];
                mpz_divexact(m[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        out.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
inline void make_primitive(IntVector& v) {
    Integer g = 0;
    for (const auto& x : v) g = gcd(g, x);
    if (g > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// One primitive integer basis vector per free column, via back substitution.
inline IntMatrix integer_nullspace(const IntMatrix& m, std::size_t ncols) {
    for (const auto& row : m) require(row.size() == ncols, "ragged matrix");
    EchelonForm ech = bareiss_echelon(m);
    ech.cols = ncols;

    std::vector<bool> is_pivot(ncols, false);
    for (auto c : ech.pivots) is_pivot[c] = true;

    IntMatrix basis;
    for (std::size_t free = 0; free < ncols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> x(ncols, Rational(0));
        x[free] = 1;
        for (std::size_t i = ech.rank(); i-- > 0;) {
            const std::size_t pc = ech.pivots[i];
            Rational s = 0;
            for (std::size_t j = pc + 1; j < ncols; ++j)
                if (x[j] != 0) s += Rational(ech.rows[i][j]) * x[j];
            x[pc] = -s / Rational(ech.rows[i][pc]);
        }
        Integer lcm_den = 1;
        for (const auto& q : x) lcm_den = lcm(lcm_den, q.get_den());
        IntVector v(ncols);
        for (std::size_t j = 0; j < ncols; ++j) {
            Rational scaled = x[j] * Rational(lcm_den);
            v[j] = scaled.get_num();
        }
        make_primitive(v);
        basis.push_back(std::move(v));
    }

    for (const auto& v : basis)
        for (const auto& row : m) {
            Integer dot = 0;
            for (std::size_t j = 0; j < ncols; ++j) dot += row[j] * v[j];
            ensure(dot == 0, "nullspace vector fails M*v = 0");
        }
    return basis;
}

} // namespace paucity
