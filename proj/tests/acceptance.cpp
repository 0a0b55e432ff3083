// End-to-end acceptance run: one PASS/FAIL line per criterion, each with its
// own time limit. Exit status is non-zero when any criterion fails.

#include "oracles.hpp"
#include "paucity/paucity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace paucity;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Checker {
public:
    void expect(bool cond, const std::string& what) {
        if (!cond && out_.ok) {
            out_.ok = false;
            out_.detail = what;
        }
    }
    bool ok() const { return out_.ok; }
    Outcome take(std::string summary) {
        if (out_.ok) out_.detail = std::move(summary);
        return out_;
    }

private:
    Outcome out_;
};

int failures = 0;

void criterion(int n, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && t > limit_s) {
        o.ok = false;
        o.detail += " (exceeded " + std::to_string(limit_s) + " s)";
    }
    failures += !o.ok;
    std::printf("%s criterion %d: %s [%.2f s] %s\n", o.ok ? "PASS" : "FAIL", n, name, t, o.detail.c_str());
    std::fflush(stdout);
}

SystemSpec positive(unsigned k, unsigned d = 1) { return {k, d, Variant::positive_box}; }
SystemSpec signed_spec(unsigned k) { return {k, 1, Variant::signed_box}; }

Rational q(long p, long d) {
    Rational r(p, d);
    r.canonicalize();
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point s) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
}

} // namespace

int main() {
    criterion(1, "exponent exactness", 1.0, [] {
        Checker c;
        auto a2 = alpha_k(2), a3 = alpha_k(3), a4 = alpha_k(4);
        c.expect(a2.value == 4 && a2.argmin == std::vector<unsigned>{2, 3}, "alpha_2");
        c.expect(a3.value == q(14, 3) && a3.argmin == std::vector<unsigned>{3}, "alpha_3");
        c.expect(a4.value == q(16, 3) && a4.argmin == std::vector<unsigned>{3}, "alpha_4");
        for (unsigned k = 2; k <= 1000; ++k) {
            const Rational s = alpha_k(k).value + 1;
            c.expect(s * s <= Rational(8 * k + 9), "(alpha+1)^2 > 8k+9 at k=" + std::to_string(k));
        }
        return c.take("alpha_2=4 {2,3}, alpha_3=14/3 {3}, alpha_4=16/3 {3}; bound holds k=2..1000");
    });

    criterion(2, "refined exponent beta", 1.0, [] {
        Checker c;
        auto b4 = beta_k(4);
        c.expect(b4.value == q(34, 7), "beta_4 = " + to_string(b4.value));
        for (unsigned k = 2; k <= 64; ++k)
            c.expect(beta_k(k).value <= alpha_k(k).value, "beta > alpha at k=" + std::to_string(k));
        return c.take("beta_4=34/7; beta_k <= alpha_k for k=2..64");
    });

    criterion(3, "discrete AM-GM sweep", 5.0, [] {
        Checker c;
        std::set<long> pronic;
        for (long m = 2; m * (m - 1) <= 10000; ++m) pronic.insert(m * (m - 1));
        std::size_t equalities = 0;
        for (long lam = 1; lam <= 10000; ++lam) {
            auto d = discrete_min(lam);
            c.expect(d.value_sq <= Rational(4 * lam + 1), "bound fails at lambda=" + std::to_string(lam));
            c.expect(d.equality == (pronic.count(lam) == 1), "equality mismatch at lambda=" + std::to_string(lam));
            equalities += d.equality;
        }
        return c.take("lambda=1..10^4, " + std::to_string(equalities) + " equalities, all at m(m-1)");
    });

    criterion(4, "Upsilon construction and factor identity", 120.0, [] {
        Checker c;
        SparsePoly u2(2);
        u2.add_term({3, 0}, 1);
        u2.add_term({0, 1}, -1);
        SparsePoly u3(3);
        u3.add_term({6, 0, 0}, 1);
        u3.add_term({3, 1, 0}, -5);
        u3.add_term({0, 2, 0}, -5);
        u3.add_term({1, 0, 1}, 9);
        c.expect(upsilon(2) == u2, "Upsilon_2 = " + pretty(upsilon(2)));
        c.expect(upsilon(3) == u3, "Upsilon_3 = " + pretty(upsilon(3)));
        for (unsigned k = 2; k <= 4; ++k)
            c.expect(construct_upsilon(k).nullspace_dim == 1, "nullspace dimension at k=" + std::to_string(k));

        auto start = std::chrono::steady_clock::now();
        const Integer C2 = factor_identity_constant(2), C3 = factor_identity_constant(3);
        const double t23 = seconds_since(start);
        c.expect(C2 == 3 && C3 == 45, "C_2=" + C2.get_str() + " C_3=" + C3.get_str());
        c.expect(t23 < 10.0, "k=2,3 identity took " + std::to_string(t23) + " s");

        start = std::chrono::steady_clock::now();
        const Integer C4 = factor_identity_constant(4);
        const double t4 = seconds_since(start);
        c.expect(C4 > 0 && t4 < 120.0, "k=4 identity took " + std::to_string(t4) + " s");
        std::ostringstream os;
        os << "Upsilon_2, Upsilon_3 exact; dim 1 for k=2..4; C_2=3, C_3=45 (" << t23 << " s), C_4=" << C4.get_str()
           << " (" << t4 << " s)";
        return c.take(os.str());
    });

    criterion(5, "closed-form diagonal counts", 60.0, [] {
        Checker c;
        for (unsigned long P = 1; P <= 8; ++P)
            c.expect(exact_L_star(2, P) == oracle::L_star(2, static_cast<Value>(P)), "L*_2 at P=" + std::to_string(P));
        for (unsigned long P = 1; P <= 5; ++P)
            c.expect(exact_L_star(3, P) == oracle::L_star(3, static_cast<Value>(P)), "L*_3 at P=" + std::to_string(P));
        for (unsigned long P = 1; P <= 4; ++P)
            c.expect(exact_L_signed(2, P) == oracle::L_signed(2, static_cast<Value>(P)),
                     "L_2 at P=" + std::to_string(P));
        c.expect(exact_L_star(2, 2) == 20, "L*_2(2)");
        c.expect(exact_L_signed(2, 1) == 141, "L_2(1)");
        return c.take("L* k=2 P<=8, k=3 P<=5, L k=2 P<=4 match brute force; L*_2(2)=20, L_2(1)=141");
    });

    criterion(6, "counting equals the naive oracle; threads are deterministic", 120.0, [] {
        Checker c;
        std::size_t cases = 0;
        for (const auto& spec : {positive(2), positive(3), positive(4), positive(2, 2), positive(3, 2), positive(2, 3),
                                 signed_spec(2), signed_spec(3)}) {
            const bool pos = spec.variant == Variant::positive_box;
            for (unsigned long P = 1;; ++P) {
                const double width = pos ? static_cast<double>(P) : 2.0 * static_cast<double>(P) + 1;
                if (std::pow(width, 2.0 * spec.half_length()) > 1e6) break;
                const auto got = count(spec, P);
                const auto want = oracle::count(spec, static_cast<Value>(P));
                const std::string tag = std::string(to_string(spec.variant)) + " k=" + std::to_string(spec.k) +
                                        " d=" + std::to_string(spec.d) + " P=" + std::to_string(P);
                c.expect(got.V == want.V && got.L == want.L, "mismatch at " + tag);
                c.expect(count(spec, P, {4}).same_counts(got), "threads differ at " + tag);
                ++cases;
            }
        }
        for (const auto& spec : {positive(2), signed_spec(2), positive(3, 2)})
            c.expect(count(spec, 40, {1}).same_counts(count(spec, 40, {4})), "threads differ at P=40");
        return c.take(std::to_string(cases) + " (variant,k,d,P) cases with <= 10^6 pairs; 1 vs 4 threads identical");
    });

    criterion(7, "smallest non-trivial instance", 60.0, [] {
        Checker c;
        auto s = smallest_nontrivial(positive(2), 6);
        c.expect(s.has_value() && s->P == 6, "P_min");
        if (s) {
            Tuple x = s->witness.x, y = s->witness.y;
            if (x > y) std::swap(x, y);
            c.expect(x == Tuple{1, 5, 5} && y == Tuple{2, 3, 6}, "witness " + to_csv_row(s->witness));
        }
        for (unsigned long P = 1; P <= 5; ++P)
            c.expect(count(positive(2), P).delta == 0, "delta non-zero below 6 at P=" + std::to_string(P));
        c.expect(count(positive(2), 6).delta == 36, "delta at P=6");
        return c.take("P_min=6, witness ({2,3,6},{1,5,5}), V*-L* = 36");
    });

    criterion(8, "structure of non-trivial signed solutions (k=2, P<=40)", 600.0, [] {
        Checker c;
        std::size_t listed = 0;
        for (unsigned long P = 1; P <= 40; ++P) {
            const auto list = list_nontrivial(signed_spec(2), P);
            const auto res = count(signed_spec(2), P);
            c.expect((res.delta == 0) == list.empty(), "delta/listing disagree at P=" + std::to_string(P));
            if (P < 40) continue;
            listed = list.size();
            for (const auto& s : list) {
                const auto z = to_integers(s.x);
                c.expect(!has_vanishing_pair_sum(z), "vanishing pair sum in " + to_csv_row(s));
                c.expect(std::count(s.x.begin(), s.x.end(), 0) <= 1, "two zeros in " + to_csv_row(s));
                if (!has_vanishing_pair_sum(z))
                    c.expect(verify_product_relations(z, 2).first_two, "product identity fails on " + to_csv_row(s));
            }
        }
        return c.take("P=1..40 delta=0 iff empty; " + std::to_string(listed) +
                      " solutions at P=40 with nonzero pair sums, <=1 zero, product identity");
    });

    criterion(9, "cascade round trip", 600.0, [] {
        Checker c;
        std::size_t runs = 0;
        for (const auto& s : list_nontrivial(signed_spec(2), 40)) {
            const auto z = to_integers(s.x);
            for (unsigned r : {3u, 4u, 5u}) {
                auto arranged = arrange_for_prefix(z, r);
                if (!arranged) continue;
                const auto u = build_u(*arranged, r);
                Integer col = u.column_product(0);
                for (unsigned m = 1; m < r; ++m) c.expect(u.column_product(m) == col, "column products");
                const auto dec = gcd_cascade(u);
                for (unsigned l = 0; l <= u.kappa; ++l)
                    for (unsigned m = 0; m < r; ++m)
                        c.expect(dec.entry(l, m) == u.at(l, m), "reconstruction of u at " + to_csv_row(s));
                const auto ap = a_products(dec);
                c.expect(ap.witness >= 1 &&
                             ipow(ap.A[ap.witness - 1], r) <= ipow(Integer(2) * u.P, u.kappa),
                         "A_p bound at " + to_csv_row(s));
                c.expect(reconstruct_solution(u.z_prefix, u) == *arranged, "round trip at " + to_csv_row(s));
                ++runs;
            }
        }
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<int> rdist(2, 4), kdist(1, 3), small(1, 9), coin(0, 1);
        for (int it = 0; it < 1000; ++it) {
            const unsigned r = static_cast<unsigned>(rdist(rng)), kappa = static_cast<unsigned>(kdist(rng));
            const IndexLattice lat(r, kappa);
            IntMatrix grid(kappa + 1, IntVector(r, Integer(1)));
            for (std::size_t f = 0; f < lat.size(); ++f) {
                const auto i = lat.index(f);
                const Integer a = coin(rng) ? Integer(1) : Integer(small(rng));
                for (unsigned m = 0; m < r; ++m) grid[i[m]][m] *= a;
            }
            for (auto& row : grid)
                for (auto& x : row)
                    if (coin(rng)) x = -x;
            const auto dec = gcd_cascade(grid);
            for (unsigned l = 0; l <= kappa; ++l)
                for (unsigned m = 0; m < r; ++m) c.expect(dec.entry(l, m) == grid[l][m], "fuzz " + std::to_string(it));
        }
        return c.take(std::to_string(runs) + " (solution, r) round trips; 1000 fuzzed grids exact");
    });

    criterion(10, "growth survey k=2 positive (soft)", 300.0, [] {
        Checker c;
        auto rep = survey(positive(2), {20, 40, 80, 160}, {1});
        std::ostringstream os;
        os << "deltas";
        for (const auto& r : rep.counts) {
            os << ' ' << r.delta.get_str();
            c.expect(r.delta > 0, "delta zero at P=" + std::to_string(r.P));
        }
        c.expect(rep.counts.size() == 4, "ladder incomplete");
        c.expect(rep.slope.has_value(), "no slope");
        if (rep.slope) {
            os << ", slope " << *rep.slope;
            c.expect(*rep.slope >= 1.5 && *rep.slope <= 3.0, os.str() + " outside [1.5, 3.0]");
        }
        return c.take(os.str());
    });

    criterion(11, "Psi witness", 60.0, [] {
        Checker c;
        const IntVector z{2, 3, 6, -1, -5, -5};
        const auto u = build_u(z, 3);
        bool seen = false;
        const auto n = count_psi(u.z_prefix, 2, 3, 6, [&](const IntMatrix& rows) { seen = seen || rows == u.rows; });
        c.expect(n >= 1, "Psi is zero");
        c.expect(seen, "witness rows not enumerated");
        return c.take("Psi(6; 2,3,6) = " + n.get_str() + ", witness u enumerated");
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
