#pragma once

// Multiplicative structure of non-trivial solutions: the product relations,
// the u-variables attached to a prefix of r coordinates, the gcd cascade that
// factors them over the multi-index lattice {0..kappa}^r, and the inverse map
// back to the solution.

#include "paucity/core.hpp"
#include "paucity/linalg.hpp"
#include "paucity/systems.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace paucity {

inline IntVector to_integers(std::span<const Value> t) {
    IntVector out;
    out.reserve(t.size());
    for (auto v : t) out.emplace_back(static_cast<long>(v));
    return out;
}

inline Integer product(std::span<const Integer> xs) {
    Integer p = 1;
    for (const auto& x : xs) p *= x;
    return p;
}

inline bool has_vanishing_pair_sum(std::span<const Integer> z) {
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (z[i] + z[j] == 0) return true;
    return false;
}

struct ProductRelationCheck {
    bool halves = false;      // product over pairs of each half, signed by (-1)^(k(k+1)/2)
    bool swapped = false;     // the same with z_1 and z'_1 exchanged
    bool first_two = false;   // prod_{i>=3}(z_1+z_i) = prod_{i>=3}(z_2+z_i)

    bool holds() const { return halves && swapped && first_two; }
};

/*
 * Evaluates the three product identities satisfied by every solution z of the
 * signed system with nonvanishing pairwise sums. z' denotes the second half
 * z_{k+2..2k+2}. Throws PreconditionError when some z_i + z_j vanishes.
 */
inline ProductRelationCheck verify_product_relations(std::span<const Integer> z, unsigned k) {
    require(k >= 1, "k must be >= 1");
    require(z.size() == 2 * static_cast<std::size_t>(k) + 2, "solution must have length 2k+2");
    require(!has_vanishing_pair_sum(z), "hypothesis violated: some pairwise sum z_i + z_j vanishes");
    const std::size_t h = k + 1;
    const std::span<const Integer> a = z.subspan(0, h), b = z.subspan(h, h);
    const int sign = ((k * (k + 1) / 2) % 2 == 0) ? 1 : -1;

    auto pairs_from = [](const Integer& lead, std::span<const Integer> v) {
        Integer p = 1;
        for (std::size_t l = 1; l < v.size(); ++l) p *= lead + v[l];
        return p;
    };
    auto inner_pairs = [](std::span<const Integer> v) {
        Integer p = 1;
        for (std::size_t i = 1; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) p *= v[i] + v[j];
        return p;
    };

    ProductRelationCheck c;
    c.halves = pairs_from(a[0], a) * inner_pairs(a) == sign * pairs_from(b[0], b) * inner_pairs(b);
    c.swapped = pairs_from(b[0], a) * inner_pairs(a) == sign * pairs_from(a[0], b) * inner_pairs(b);
    Integer lhs = 1, rhs = 1;
    for (std::size_t i = 2; i < z.size(); ++i) {
        lhs *= z[0] + z[i];
        rhs *= z[1] + z[i];
    }
    c.first_two = lhs == rhs;
    return c;
}

/// u-variables of a solution relative to its first r coordinates.
struct UMatrix {
    unsigned r = 0;
    unsigned kappa = 0;
    IntVector u0;      // row 0, length r
    IntMatrix rows;    // rows 1..kappa, each of length r
    IntVector z_prefix;
    Integer P;

    const Integer& at(unsigned l, unsigned m) const { return l == 0 ? u0[m] : rows[l - 1][m]; }

    /// Rows 0..kappa stacked.
    IntMatrix grid() const {
        IntMatrix g;
        g.push_back(u0);
        g.insert(g.end(), rows.begin(), rows.end());
        return g;
    }

    Integer column_product(unsigned m) const {
        Integer p = u0[m];
        for (const auto& row : rows) p *= row[m];
        return p;
    }
};

/// Throws InvariantError naming the first violated invariant.
inline void check_invariants(const UMatrix& u) {
    ensure(u.u0.size() == u.r && u.rows.size() == u.kappa && u.z_prefix.size() == u.r, "UMatrix shape mismatch");
    const Integer two_p = 2 * u.P;
    const Integer u0_bound = ipow(Integer(2), u.r) * ipow(u.P, 2 * u.r - 1);
    for (unsigned m = 0; m < u.r; ++m) {
        ensure(u.u0[m] != 0, "u_0m vanishes");
        ensure(abs(u.u0[m]) <= u0_bound, "|u_0m| exceeds 2^r P^(2r-1)");
    }
    for (unsigned l = 1; l <= u.kappa; ++l) {
        ensure(u.rows[l - 1].size() == u.r, "UMatrix row length mismatch");
        const Integer shift = u.at(l, 0) - u.z_prefix[0];
        for (unsigned m = 0; m < u.r; ++m) {
            ensure(u.at(l, m) != 0, "u_lm vanishes");
            ensure(abs(u.at(l, m)) <= two_p, "|u_lm| exceeds 2P");
            ensure(u.at(l, m) - u.z_prefix[m] == shift, "chain relation u_lm - z_m fails");
        }
    }
    const Integer first = u.column_product(0);
    for (unsigned m = 1; m < u.r; ++m) ensure(u.column_product(m) == first, "column products differ");
}

/// Prefix conditions: nonzero entries with pairwise distinct squares.
inline bool valid_prefix(std::span<const Integer> prefix) {
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] == 0) return false;
        for (std::size_t j = i + 1; j < prefix.size(); ++j)
            if (prefix[i] * prefix[i] == prefix[j] * prefix[j]) return false;
    }
    return true;
}

/*
 * u_0m = prod_{i<=r, i!=m} z_i * prod_{j<=r} (z_m + z_j)
 * u_lm = z_m + z_{r+l}                          (1 <= l <= kappa)
 *
 * P defaults to max |z_i|. Preconditions are checked (PreconditionError);
 * a constructed matrix violating its invariants raises InvariantError.
 */
inline UMatrix build_u(std::span<const Integer> z, unsigned r, std::optional<Integer> P = std::nullopt) {
    require(z.size() >= 6 && z.size() % 2 == 0, "solution length must be 2k+2 with k >= 2");
    const unsigned k = static_cast<unsigned>(z.size() / 2 - 1);
    require(r >= 2 && r <= 2 * k + 1, "r must satisfy 2 <= r <= 2k+1");
    for (unsigned j = 1; j <= k; ++j) {
        Integer s = 0;
        for (const auto& v : z) s += ipow(v, 2 * j - 1);
        require(s == 0, "z does not solve the signed system (power sum " + std::to_string(2 * j - 1) +
                            " is " + s.get_str() + ")");
    }
    require(!has_vanishing_pair_sum(z), "some pairwise sum z_i + z_j vanishes");
    const std::span<const Integer> prefix = z.subspan(0, r);
    require(valid_prefix(prefix), "prefix must have nonzero entries with distinct squares");

    Integer bound = 0;
    for (const auto& v : z) bound = std::max(bound, Integer(abs(v)));
    if (P) {
        require(*P >= bound, "P is smaller than max |z_i|");
        bound = *P;
    }

    UMatrix u;
    u.r = r;
    u.kappa = static_cast<unsigned>(z.size()) - r;
    u.P = bound;
    u.z_prefix.assign(prefix.begin(), prefix.end());
    for (unsigned m = 0; m < r; ++m) {
        Integer v = 1;
        for (unsigned i = 0; i < r; ++i)
            if (i != m) v *= z[i];
        for (unsigned j = 0; j < r; ++j) v *= z[m] + z[j];
        u.u0.push_back(v);
    }
    for (unsigned l = 1; l <= u.kappa; ++l) {
        IntVector row;
        for (unsigned m = 0; m < r; ++m) row.push_back(z[m] + z[r + l - 1]);
        u.rows.push_back(std::move(row));
    }
    check_invariants(u);
    return u;
}

/// z_{r+l} = u_lm - z_m, required to agree for every column m.
inline IntVector reconstruct_solution(std::span<const Integer> z_prefix, const UMatrix& u) {
    require(z_prefix.size() == u.r, "prefix length must equal r");
    IntVector z(z_prefix.begin(), z_prefix.end());
    for (unsigned l = 1; l <= u.kappa; ++l) {
        const Integer tail = u.at(l, 0) - z_prefix[0];
        for (unsigned m = 1; m < u.r; ++m)
            if (u.at(l, m) - z_prefix[m] != tail)
                throw PreconditionError("inconsistent u row " + std::to_string(l) + ": column " +
                                        std::to_string(m + 1) + " implies z_" + std::to_string(u.r + l) + " = " +
                                        Integer(u.at(l, m) - z_prefix[m]).get_str() + ", column 1 implies " +
                                        tail.get_str());
        z.push_back(tail);
    }
    return z;
}

/// Lattice {0..kappa}^r, indexed by phi(i) = sum_m i_m (kappa+1)^(m-1).
class IndexLattice {
public:
    IndexLattice(unsigned r, unsigned kappa) : r_(r), base_(kappa + 1) {
        require(r >= 1 && kappa >= 1, "lattice needs r >= 1 and kappa >= 1");
        std::size_t n = 1;
        for (unsigned m = 0; m < r; ++m) {
            require(n <= (std::size_t{1} << 24) / base_, "lattice too large");
            n *= base_;
        }
        size_ = n;
    }

    std::size_t size() const { return size_; }
    unsigned r() const { return r_; }
    unsigned kappa() const { return base_ - 1; }

    std::size_t phi(std::span<const unsigned> i) const {
        require(i.size() == r_, "multi-index has wrong length");
        std::size_t v = 0;
        for (std::size_t m = r_; m-- > 0;) {
            require(i[m] < base_, "multi-index entry out of range");
            v = v * base_ + i[m];
        }
        return v;
    }

    std::vector<unsigned> index(std::size_t phi) const {
        require(phi < size_, "phi out of range");
        std::vector<unsigned> i(r_);
        for (unsigned m = 0; m < r_; ++m) {
            i[m] = static_cast<unsigned>(phi % base_);
            phi /= base_;
        }
        return i;
    }

private:
    unsigned r_;
    unsigned base_;
    std::size_t size_ = 0;
};

struct CascadeDecomposition {
    unsigned r = 0;
    unsigned kappa = 0;
    IntVector alphas;                     // indexed by phi
    std::vector<std::vector<int>> signs;  // (kappa+1) x r, sign of u_lm
    Integer row_bound;                    // 2P, bounds |u_lm| for l >= 1

    IndexLattice lattice() const { return IndexLattice(r, kappa); }

    /// prod over i with i_m = l of alpha_i (m zero-based).
    Integer slice_product(unsigned l, unsigned m) const {
        const auto lat = lattice();
        Integer p = 1;
        for (std::size_t f = 0; f < alphas.size(); ++f)
            if (lat.index(f)[m] == l) p *= alphas[f];
        return p;
    }

    /// Signed reconstruction of u_lm.
    Integer entry(unsigned l, unsigned m) const { return slice_product(l, m) * signs[l][m]; }
};

/*
 * Runs the gcd recursion over the lattice in increasing phi order:
 *   beta_i^(m) = prod of already assigned alpha_j with j_m = i_m,
 *   alpha_i    = gcd_m ( |u_{i_m, m}| / beta_i^(m) ).
 * Works on magnitudes; signs are recorded separately. The grid has kappa+1
 * rows of length r with equal absolute column products. `row_bound`
 * defaults to the largest |u_lm| with l >= 1.
 */
inline CascadeDecomposition gcd_cascade(const IntMatrix& grid, std::optional<Integer> row_bound = std::nullopt) {
    require(grid.size() >= 2, "grid needs at least two rows (kappa >= 1)");
    const unsigned r = static_cast<unsigned>(grid.front().size());
    const unsigned kappa = static_cast<unsigned>(grid.size()) - 1;
    require(r >= 2, "grid needs at least two columns");
    for (const auto& row : grid) {
        require(row.size() == r, "ragged grid");
        for (const auto& x : row) require(x != 0, "grid entries must be nonzero");
    }
    Integer col0 = 1;
    for (const auto& row : grid) col0 *= row[0];
    for (unsigned m = 1; m < r; ++m) {
        Integer c = 1;
        for (const auto& row : grid) c *= row[m];
        require(abs(c) == abs(col0), "column products differ in absolute value");
    }

    const IndexLattice lat(r, kappa);
    CascadeDecomposition dec;
    dec.r = r;
    dec.kappa = kappa;
    dec.alphas.assign(lat.size(), Integer(0));
    if (row_bound) {
        dec.row_bound = *row_bound;
    } else {
        dec.row_bound = 0;
        for (unsigned l = 1; l <= kappa; ++l)
            for (const auto& x : grid[l]) dec.row_bound = std::max(dec.row_bound, Integer(abs(x)));
    }

    // assigned[m][l]: product of alpha_j assigned so far with j_m = l.
    std::vector<IntVector> assigned(r, IntVector(kappa + 1, Integer(1)));
    Integer q;
    for (std::size_t f = 0; f < lat.size(); ++f) {
        const auto i = lat.index(f);
        Integer g = 0;
        for (unsigned m = 0; m < r; ++m) {
            const Integer mag = abs(grid[i[m]][m]);
            const Integer& beta = assigned[m][i[m]];
            if (!mpz_divisible_p(mag.get_mpz_t(), beta.get_mpz_t())) {
                std::string where;
                for (auto x : i) where += std::to_string(x) + ",";
                throw InvariantError("beta does not divide u at index (" + where + ") column " +
                                     std::to_string(m + 1) + ": |u|=" + mag.get_str() + " beta=" + beta.get_str());
            }
            mpz_divexact(q.get_mpz_t(), mag.get_mpz_t(), beta.get_mpz_t());
            g = gcd(g, q);
        }
        ensure(g >= 1, "gcd cascade produced a non-positive alpha");
        dec.alphas[f] = g;
        for (unsigned m = 0; m < r; ++m) assigned[m][i[m]] *= g;
    }

    dec.signs.assign(kappa + 1, std::vector<int>(r, 1));
    for (unsigned l = 0; l <= kappa; ++l)
        for (unsigned m = 0; m < r; ++m) {
            if (assigned[m][l] != abs(grid[l][m]))
                throw InvariantError("reconstruction fails at (l=" + std::to_string(l) + ", m=" +
                                     std::to_string(m + 1) + "): slice product " + assigned[m][l].get_str() +
                                     " vs |u| " + Integer(abs(grid[l][m])).get_str());
            dec.signs[l][m] = grid[l][m] < 0 ? -1 : 1;
        }
    return dec;
}

inline CascadeDecomposition gcd_cascade(const UMatrix& u) {
    check_invariants(u);
    return gcd_cascade(u.grid(), Integer(2 * u.P));
}

struct AProducts {
    IntVector A;          // A_1..A_r
    unsigned witness = 0; // 1-based p with A_p^r <= row_bound^kappa
    Integer product;      // prod_p A_p
    Integer first_column; // prod_{l>=1} |u_l1|
};

/*
 * A_p = prod of alpha_i over indices with i_p >= 1 and i_l > i_p for every
 * l != p. The index sets are disjoint subsets of {i : all i_m >= 1}, which
 * gives prod A_p <= prod_l |u_l1| <= row_bound^kappa and hence some p with
 * A_p^r <= row_bound^kappa.
 */
inline AProducts a_products(const CascadeDecomposition& dec) {
    const auto lat = dec.lattice();
    AProducts out;
    out.A.assign(dec.r, Integer(1));
    for (std::size_t f = 0; f < lat.size(); ++f) {
        const auto i = lat.index(f);
        for (unsigned p = 0; p < dec.r; ++p) {
            if (i[p] < 1) continue;
            bool strict_min = true;
            for (unsigned l = 0; l < dec.r && strict_min; ++l)
                if (l != p && i[l] <= i[p]) strict_min = false;
            if (strict_min) out.A[p] *= dec.alphas[f];
        }
    }
    out.product = product(out.A);
    out.first_column = 1;
    for (unsigned l = 1; l <= dec.kappa; ++l) out.first_column *= dec.slice_product(l, 0);
    const Integer cap = ipow(dec.row_bound, dec.kappa);
    ensure(out.product <= out.first_column, "prod A_p exceeds prod |u_l1|");
    ensure(out.first_column <= cap, "prod |u_l1| exceeds (2P)^kappa");
    for (unsigned p = 0; p < dec.r; ++p)
        if (ipow(out.A[p], dec.r) <= cap) {
            out.witness = p + 1;
            break;
        }
    ensure(out.witness != 0, "no p with A_p^r <= (2P)^kappa");
    return out;
}

inline nlohmann::json to_json(const CascadeDecomposition& dec) {
    const auto lat = dec.lattice();
    nlohmann::json alphas = nlohmann::json::array();
    for (std::size_t f = 0; f < lat.size(); ++f) {
        nlohmann::json entry = nlohmann::json::array();
        for (auto x : lat.index(f)) entry.push_back(x);
        entry.push_back(dec.alphas[f].get_str());
        alphas.push_back(std::move(entry));
    }
    return {{"r", dec.r}, {"kappa", dec.kappa}, {"alphas", alphas}, {"signs", dec.signs}};
}

/// Ordered u rows (1..kappa) solving the product and chain relations for a fixed prefix.
using PsiVisitor = std::function<void(const IntMatrix& rows)>;

inline constexpr std::uint64_t default_psi_budget = 50'000'000;

/*
 * Brute force over u_l1 in [-2P, 2P] \ {0}; the chain relation fixes the
 * rest of each row. Returns the number of row tuples whose entries all lie
 * in [1, 2P] in absolute value and whose column products (with row 0 from
 * the prefix) agree.
 */
inline Integer count_psi(std::span<const Integer> z_prefix, unsigned k, unsigned r, unsigned long P,
                         const PsiVisitor& visit = {}, std::uint64_t budget = default_psi_budget) {
    require(k >= 2, "k must be >= 2");
    require(r >= 2 && r <= 2 * k + 1, "r must satisfy 2 <= r <= 2k+1");
    require(z_prefix.size() == r, "prefix length must equal r");
    require(valid_prefix(z_prefix), "prefix must have nonzero entries with distinct squares");
    require(P >= 1, "P must be >= 1");
    const unsigned kappa = 2 * k + 2 - r;
    const Integer work = ipow(Integer(4 * P), kappa);
    if (work > budget)
        throw BudgetError("Psi enumeration needs (4P)^kappa = " + work.get_str() + " steps", work.fits_ulong_p() ? work.get_ui() : ~0ul,
                          budget);

    IntVector u0;
    for (unsigned m = 0; m < r; ++m) {
        Integer v = 1;
        for (unsigned i = 0; i < r; ++i)
            if (i != m) v *= z_prefix[i];
        for (unsigned j = 0; j < r; ++j) v *= z_prefix[m] + z_prefix[j];
        u0.push_back(v);
    }

    const Integer two_p = 2 * static_cast<long>(P);
    IntMatrix candidates;
    for (long v = -2 * static_cast<long>(P); v <= 2 * static_cast<long>(P); ++v) {
        if (v == 0) continue;
        IntVector row;
        bool ok = true;
        for (unsigned m = 0; m < r && ok; ++m) {
            Integer e = Integer(v) - z_prefix[0] + z_prefix[m];
            ok = e != 0 && abs(e) <= two_p;
            row.push_back(std::move(e));
        }
        if (ok) candidates.push_back(std::move(row));
    }

    Integer total = 0;
    IntMatrix rows(kappa);
    std::vector<IntVector> partial(kappa + 1, IntVector(r));
    partial[0] = u0;
    auto rec = [&](auto&& self, unsigned l) -> void {
        if (l == kappa) {
            for (unsigned m = 1; m < r; ++m)
                if (partial[kappa][m] != partial[kappa][0]) return;
            ++total;
            if (visit) visit(rows);
            return;
        }
        for (const auto& cand : candidates) {
            rows[l] = cand;
            for (unsigned m = 0; m < r; ++m) partial[l + 1][m] = partial[l][m] * cand[m];
            self(self, l + 1);
        }
    };
    rec(rec, 0);
    return total;
}

/// Reorders z so that its first r entries form a valid prefix; nullopt if impossible.
inline std::optional<IntVector> arrange_for_prefix(std::span<const Integer> z, unsigned r) {
    IntVector head, tail;
    std::set<Integer> squares;
    for (const auto& v : z) {
        if (head.size() < r && v != 0 && squares.insert(v * v).second)
            head.push_back(v);
        else
            tail.push_back(v);
    }
    if (head.size() < r) return std::nullopt;
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

} // namespace paucity
