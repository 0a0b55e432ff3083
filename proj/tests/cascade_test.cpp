#include "paucity/cascade.hpp"
#include "paucity/enumeration.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace paucity;

namespace {

const IntVector kSolution{2, 3, 6, -1, -5, -5};

IntVector ints(std::initializer_list<long> xs) {
    IntVector v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

} // namespace

TEST(ProductRelations, RealSolution) {
    auto c = verify_product_relations(kSolution, 2);
    EXPECT_TRUE(c.halves);
    EXPECT_TRUE(c.swapped);
    EXPECT_TRUE(c.first_two);
}

TEST(ProductRelations, VanishingPairSumIsAnError) {
    EXPECT_THROW(verify_product_relations(ints({1, -1, 2, -2, 3, -3}), 2), PreconditionError);
}

TEST(ProductRelations, GenericNonSolutionFails) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<long> v(1, 60);
    int failures = 0, trials = 0;
    for (int it = 0; it < 200; ++it) {
        IntVector z;
        for (int i = 0; i < 6; ++i) z.emplace_back(v(rng));
        if (has_vanishing_pair_sum(z)) continue;
        ++trials;
        failures += !verify_product_relations(z, 2).holds();
    }
    EXPECT_EQ(failures, trials);
}

TEST(BuildU, WorkedExample) {
    auto u = build_u(kSolution, 3);
    EXPECT_EQ(u.kappa, 3u);
    EXPECT_EQ(u.u0, ints({2880, 3240, 5184}));
    EXPECT_EQ(u.rows, (IntMatrix{ints({1, 2, 5}), ints({-3, -2, 1}), ints({-3, -2, 1})}));
    for (unsigned m = 0; m < 3; ++m) EXPECT_EQ(u.column_product(m), 25920);
    EXPECT_EQ(u.P, 6);
}

TEST(BuildU, PrefixOfFour) {
    auto u = build_u(kSolution, 4);
    EXPECT_EQ(u.kappa, 2u);
    EXPECT_EQ(u.rows, (IntMatrix{ints({-3, -2, 1, -6}), ints({-3, -2, 1, -6})}));
}

TEST(BuildU, Errors) {
    EXPECT_THROW(build_u(ints({2, -2, 3, -3, 1, -1}), 3), PreconditionError);
    EXPECT_THROW(build_u(ints({2, 3, 6, -1, -5, -4}), 3), PreconditionError);
    EXPECT_THROW(build_u(kSolution, 1), PreconditionError);
    EXPECT_THROW(build_u(kSolution, 6), PreconditionError);
    EXPECT_THROW(build_u(kSolution, 3, Integer(5)), PreconditionError);
    // -5, -5 shares a square
    EXPECT_THROW(build_u(ints({-5, -5, 2, 3, 6, -1}), 3), PreconditionError);
}

TEST(Reconstruct, WorkedExampleAndTampering) {
    auto u = build_u(kSolution, 3);
    EXPECT_EQ(reconstruct_solution(u.z_prefix, u), kSolution);
    auto bad = u;
    bad.rows[1][2] += 1;
    EXPECT_THROW(reconstruct_solution(u.z_prefix, bad), PreconditionError);
}

TEST(GcdCascade, HandExample) {
    IntMatrix grid{ints({6, 4}), ints({10, 15})};
    auto dec = gcd_cascade(grid);
    const auto lat = dec.lattice();
    auto alpha = [&](unsigned a, unsigned b) {
        std::vector<unsigned> i{a, b};
        return dec.alphas[lat.phi(i)];
    };
    EXPECT_EQ(alpha(0, 0), 2);
    EXPECT_EQ(alpha(1, 0), 2);
    EXPECT_EQ(alpha(0, 1), 3);
    EXPECT_EQ(alpha(1, 1), 5);
    for (unsigned l = 0; l < 2; ++l)
        for (unsigned m = 0; m < 2; ++m) EXPECT_EQ(dec.entry(l, m), grid[l][m]);

    auto a = a_products(dec);
    EXPECT_EQ(a.A, ints({1, 1}));
    EXPECT_EQ(to_json(dec).dump(),
              R"({"alphas":[[0,0,"2"],[1,0,"2"],[0,1,"3"],[1,1,"5"]],"kappa":1,"r":2,"signs":[[1,1],[1,1]]})");
}

TEST(GcdCascade, UnitRowGivesUnitSlice) {
    IntMatrix grid{ints({12, 18, 6}), ints({1, 1, 1}), ints({3, 2, 6})};
    auto dec = gcd_cascade(grid);
    const auto lat = dec.lattice();
    for (std::size_t f = 0; f < lat.size(); ++f) {
        const auto i = lat.index(f);
        if (std::find(i.begin(), i.end(), 1u) != i.end()) {
            EXPECT_EQ(dec.alphas[f], 1);
        }
    }
}

TEST(GcdCascade, RealSolution) {
    auto u = build_u(kSolution, 3);
    auto dec = gcd_cascade(u);
    for (unsigned l = 0; l <= u.kappa; ++l)
        for (unsigned m = 0; m < u.r; ++m) EXPECT_EQ(dec.entry(l, m), u.at(l, m));
    EXPECT_EQ(dec.signs[2], (std::vector<int>{-1, -1, 1}));
    auto a = a_products(dec);
    ASSERT_GE(a.witness, 1u);
    EXPECT_LE(ipow(a.A[a.witness - 1], 3), ipow(Integer(12), 3));
}

TEST(GcdCascade, RejectsUnequalProducts) {
    EXPECT_THROW(gcd_cascade(IntMatrix{ints({6, 4}), ints({10, 14})}), PreconditionError);
    EXPECT_THROW(gcd_cascade(IntMatrix{ints({6, 0}), ints({10, 14})}), PreconditionError);
}

TEST(GcdCascade, FuzzedFactorGrids) {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> rdist(2, 4), kdist(1, 3), small(1, 6), sign(0, 1);
    for (int it = 0; it < 1000; ++it) {
        const unsigned r = static_cast<unsigned>(rdist(rng)), kappa = static_cast<unsigned>(kdist(rng));
        const IndexLattice lat(r, kappa);
        IntVector alpha(lat.size());
        for (auto& a : alpha) a = small(rng) <= 3 ? 1 : small(rng);
        IntMatrix grid(kappa + 1, IntVector(r, Integer(1)));
        for (std::size_t f = 0; f < lat.size(); ++f) {
            const auto i = lat.index(f);
            for (unsigned m = 0; m < r; ++m) grid[i[m]][m] *= alpha[f];
        }
        for (auto& row : grid)
            for (auto& x : row)
                if (sign(rng)) x = -x;
        auto dec = gcd_cascade(grid);
        for (unsigned l = 0; l <= kappa; ++l)
            for (unsigned m = 0; m < r; ++m) ASSERT_EQ(dec.entry(l, m), grid[l][m]) << "iteration " << it;
        for (const auto& a : dec.alphas) ASSERT_GE(a, 1);
        EXPECT_NO_THROW(a_products(dec));
    }
}

TEST(IndexLattice, PhiIsABijection) {
    for (unsigned r = 1; r <= 4; ++r)
        for (unsigned kappa = 1; kappa <= 4; ++kappa) {
            const IndexLattice lat(r, kappa);
            std::size_t expected = 1;
            for (unsigned m = 0; m < r; ++m) expected *= kappa + 1;
            ASSERT_EQ(lat.size(), expected);
            std::vector<bool> seen(lat.size(), false);
            std::vector<unsigned> i(r, 0);
            while (true) {
                const auto f = lat.phi(i);
                ASSERT_LT(f, lat.size());
                ASSERT_FALSE(seen[f]);
                seen[f] = true;
                ASSERT_EQ(lat.index(f), i);
                std::size_t m = 0;
                while (m < r && i[m] == kappa) i[m++] = 0;
                if (m == r) break;
                ++i[m];
            }
        }
    std::vector<unsigned> i{1, 2};
    EXPECT_EQ(IndexLattice(2, 3).phi(i), 1u + 2u * 4u);
}

TEST(AProducts, AllOnes) {
    IntMatrix grid(3, ints({1, 1, 1}));
    auto a = a_products(gcd_cascade(grid));
    EXPECT_EQ(a.A, ints({1, 1, 1}));
    EXPECT_EQ(a.witness, 1u);
}

TEST(Psi, RealPrefix) {
    auto u = build_u(kSolution, 3);
    bool witness_seen = false;
    auto n = count_psi(u.z_prefix, 2, 3, 6, [&](const IntMatrix& rows) { witness_seen = witness_seen || rows == u.rows; });
    EXPECT_GE(n, 1);
    EXPECT_TRUE(witness_seen);
}

TEST(Psi, PermutationInvariance) {
    const IntVector prefix = ints({2, 3, 6});
    const auto base = count_psi(prefix, 2, 3, 6);
    std::vector<int> perm{0, 1, 2};
    while (std::next_permutation(perm.begin(), perm.end())) {
        IntVector p;
        for (auto i : perm) p.push_back(prefix[static_cast<std::size_t>(i)]);
        EXPECT_EQ(count_psi(p, 2, 3, 6), base);
    }
}

TEST(Psi, EmptyWhenNoAdmissibleRow) {
    // rows are (v, v + 8), which cannot fit in [-2, 2] twice
    EXPECT_EQ(count_psi(ints({1, 9}), 2, 2, 1), 0);
}

TEST(Psi, BudgetAndPreconditions) {
    EXPECT_THROW(count_psi(ints({2, 3, 6}), 2, 3, 6, {}, 100), BudgetError);
    EXPECT_THROW(count_psi(ints({2, -2, 6}), 2, 3, 6), PreconditionError);
    EXPECT_THROW(count_psi(ints({2, 3}), 2, 3, 6), PreconditionError);
}

TEST(RoundTrip, EveryListedSignedSolution) {
    for (const auto& s : list_nontrivial({2, 1, Variant::signed_box}, 20)) {
        const auto z = to_integers(s.x);
        ASSERT_FALSE(has_vanishing_pair_sum(z));
        ASSERT_TRUE(verify_product_relations(z, 2).holds());
        for (unsigned r : {3u, 4u, 5u}) {
            auto arranged = arrange_for_prefix(z, r);
            if (!arranged) continue;
            auto u = build_u(*arranged, r, Integer(20));
            auto dec = gcd_cascade(u);
            for (unsigned l = 0; l <= u.kappa; ++l)
                for (unsigned m = 0; m < r; ++m) ASSERT_EQ(dec.entry(l, m), u.at(l, m));
            EXPECT_GE(a_products(dec).witness, 1u);
            EXPECT_EQ(reconstruct_solution(u.z_prefix, u), *arranged);
        }
    }
}
