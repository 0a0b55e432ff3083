// paucity: command line front end for the counting, cascade and exponent tools.
//
// Exit status: 0 all checks passed, 1 a reported check failed, 2 bad usage or
// precondition, 3 memory/work budget refused, 4 internal invariant or cache
// integrity failure.

#include "paucity/paucity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace paucity;
using Json = nlohmann::ordered_json;

namespace {

enum class Format { table, json, csv };

struct RunConfig {
    unsigned threads = 1;
    std::uint64_t memory_budget = CountOptions{}.memory_budget;
    std::string cache_dir;
    std::string format = "table";
    std::uint64_t seed = 0;

    Format fmt() const { return format == "json" ? Format::json : format == "csv" ? Format::csv : Format::table; }
    CountOptions count_options() const { return {threads, memory_budget}; }
};

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<unsigned, unsigned> parse_range(const std::string& text) {
    auto to_uint = [&](std::string_view s) {
        const Integer v = parse_integer(s);
        require(v >= 0 && v.fits_uint_p(), "range bound out of range in '" + text + "'");
        return static_cast<unsigned>(v.get_ui());
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        const unsigned a = to_uint(std::string_view(text).substr(0, dots));
        const unsigned b = to_uint(std::string_view(text).substr(dots + 2));
        require(a <= b, "empty range '" + text + "'");
        return {a, b};
    }
    const unsigned v = to_uint(text);
    return {v, v};
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

IntVector parse_integers(const std::string& text) {
    IntVector out;
    for (const auto& f : split(text, ',')) out.push_back(parse_integer(f));
    return out;
}

std::string join_integers(const IntVector& v, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += v[i].get_str();
    }
    return s;
}

Json integers_json(const IntVector& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

std::string flag(bool b) { return b ? "true" : "false"; }

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

// exponents ---------------------------------------------------------------

struct ExponentsArgs {
    std::string k = "2..4";
    unsigned d = 1;
};

int cmd_exponents(const RunConfig& cfg, const ExponentsArgs& a) {
    const auto [k_lo, k_hi] = parse_range(a.k);
    require(k_lo >= 2, "--k must start at 2 or more");
    require(a.d >= 1, "--d must be >= 1");

    struct Row {
        ExponentReport alpha, beta;
    };
    std::vector<Row> rows;
    bool ok = true;
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        rows.push_back({alpha_kd(k, a.d), beta_k(k)});
        ok = ok && rows.back().alpha.bound_holds;
        for (const auto& c : rows.back().beta.psi_checks) ok = ok && c.holds;
    }

    switch (cfg.fmt()) {
    case Format::csv:
        std::cout << "k,d,alpha,argmin_r,bound_sq_lhs,bound_sq_rhs,equality_flag,bound_holds,beta,beta_argmin_r\n";
        for (const auto& r : rows)
            std::cout << r.alpha.k << ',' << r.alpha.d << ',' << to_string(r.alpha.value) << ','
                      << join(r.alpha.argmin) << ',' << to_string(r.alpha.bound_lhs) << ','
                      << r.alpha.bound_rhs.get_str() << ',' << flag(r.alpha.bound_equality) << ','
                      << flag(r.alpha.bound_holds) << ',' << to_string(r.beta.value) << ',' << join(r.beta.argmin)
                      << '\n';
        break;
    case Format::json: {
        Json out = Json::array();
        for (const auto& r : rows)
            out.push_back({{"k", r.alpha.k},
                           {"d", r.alpha.d},
                           {"alpha", to_string(r.alpha.value)},
                           {"argmin_r", r.alpha.argmin},
                           {"bound_sq_lhs", to_string(r.alpha.bound_lhs)},
                           {"bound_sq_rhs", r.alpha.bound_rhs.get_str()},
                           {"equality", r.alpha.bound_equality},
                           {"bound_holds", r.alpha.bound_holds},
                           {"beta", to_string(r.beta.value)},
                           {"beta_argmin_r", r.beta.argmin}});
        print_json(out);
        break;
    }
    case Format::table:
        std::cout << (a.d == 1 ? "k  d  alpha" : "k  d  alpha_kd") << "  argmin_r  (alpha+d)^2  8d(k+1)+1  equality  beta  beta_argmin_r\n";
        for (const auto& r : rows)
            std::cout << r.alpha.k << "  " << r.alpha.d << "  " << to_string(r.alpha.value) << "  "
                      << join(r.alpha.argmin) << "  " << to_string(r.alpha.bound_lhs) << "  "
                      << r.alpha.bound_rhs.get_str() << "  " << flag(r.alpha.bound_equality) << "  "
                      << to_string(r.beta.value) << "  " << join(r.beta.argmin) << '\n';
        break;
    }
    if (!ok) throw CheckFailed("exponent comparator (alpha+d)^2 <= 8d(k+1)+1 fails for some requested row");
    return 0;
}

// count / survey / smallest ----------------------------------------------

struct SystemArgs {
    std::string variant = "positive";
    unsigned k = 2;
    unsigned d = 1;

    SystemSpec spec() const {
        SystemSpec s{k, d, parse_variant(variant)};
        s.validate();
        return s;
    }
};

void add_system_options(CLI::App* cmd, SystemArgs& a) {
    cmd->add_option("--variant", a.variant, "signed | positive")->capture_default_str();
    cmd->add_option("--k", a.k, "number of equations")->capture_default_str();
    cmd->add_option("--d", a.d, "inner exponent (positive variant only)")->capture_default_str();
}

CountResult counted(const RunConfig& cfg, const SystemSpec& spec, unsigned long P) {
    std::optional<CountCache> cache;
    if (!cfg.cache_dir.empty()) {
        cache.emplace(cfg.cache_dir);
        if (auto hit = cache_get(*cache, spec, P)) {
            std::cerr << "cache hit: " << to_string(spec.variant) << " k=" << spec.k << " d=" << spec.d << " P=" << P
                      << '\n';
            return *hit;
        }
    }
    auto res = count(spec, P, cfg.count_options());
    std::cerr << "counted " << to_string(spec.variant) << " k=" << spec.k << " d=" << spec.d << " P=" << P << " in "
              << res.wall_time << " s\n";
    if (cache) cache_put(*cache, res);
    return res;
}

Json count_json(const CountResult& r) {
    return {{"variant", std::string(to_string(r.spec.variant))},
            {"k", r.spec.k},
            {"d", r.spec.d},
            {"P", r.P},
            {"V", r.V.get_str()},
            {"L", r.L.get_str()},
            {"delta", r.delta.get_str()},
            {"tool_version", r.tool_version}};
}

struct CountArgs {
    SystemArgs system;
    unsigned long pmax = 6;
    std::string list_file;
    std::size_t limit = 0;
};

int cmd_count(const RunConfig& cfg, const CountArgs& a) {
    const auto spec = a.system.spec();
    const auto res = counted(cfg, spec, a.pmax);

    if (!a.list_file.empty()) {
        const auto list = list_nontrivial(spec, a.pmax, a.limit, cfg.count_options());
        std::ofstream out(a.list_file);
        if (!out) throw std::runtime_error("cannot write " + a.list_file);
        out << csv_header(spec) << '\n';
        for (const auto& s : list) out << to_csv_row(s) << '\n';
        std::cerr << "wrote " << list.size() << " non-trivial records to " << a.list_file << '\n';
    }

    switch (cfg.fmt()) {
    case Format::csv:
        std::cout << "variant,k,d,P,V,L,delta\n"
                  << to_string(spec.variant) << ',' << spec.k << ',' << spec.d << ',' << res.P << ','
                  << res.V.get_str() << ',' << res.L.get_str() << ',' << res.delta.get_str() << '\n';
        break;
    case Format::json:
        print_json(count_json(res));
        break;
    case Format::table:
        std::cout << "variant " << to_string(spec.variant) << "  k " << spec.k << "  d " << spec.d << "  P " << res.P
                  << "\nV      " << res.V.get_str() << "\nL      " << res.L.get_str() << "\ndelta  "
                  << res.delta.get_str() << '\n';
        break;
    }
    return 0;
}

struct SurveyArgs {
    SystemArgs system;
    std::string ladder = "20,40,80,160";
};

int cmd_survey(const RunConfig& cfg, const SurveyArgs& a) {
    const auto spec = a.system.spec();
    std::vector<unsigned long> ladder;
    for (const auto& f : split(a.ladder, ',')) {
        const Integer v = parse_integer(f);
        require(v >= 1 && v.fits_ulong_p(), "ladder entries must be positive integers");
        ladder.push_back(v.get_ui());
    }
    const auto rep = survey(spec, ladder, cfg.count_options(), [&](unsigned long P) { return counted(cfg, spec, P); });

    auto fixed = [](double x) {
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(6);
        os << x;
        return os.str();
    };

    switch (cfg.fmt()) {
    case Format::csv:
        std::cout << "P,V,L,delta\n";
        for (const auto& c : rep.counts)
            std::cout << c.P << ',' << c.V.get_str() << ',' << c.L.get_str() << ',' << c.delta.get_str() << '\n';
        break;
    case Format::json: {
        Json rungs = Json::array();
        for (const auto& c : rep.counts) rungs.push_back(count_json(c));
        Json out{{"variant", std::string(to_string(spec.variant))}, {"k", spec.k}, {"d", spec.d}, {"rungs", rungs}};
        out["fit_points"] = rep.fit_points;
        if (rep.slope) {
            out["slope"] = fixed(*rep.slope);
            out["slope_rational"] = to_string(*rep.slope_rational);
            out["intercept"] = fixed(*rep.intercept);
            Json res = Json::array();
            for (double r : rep.residuals) res.push_back(fixed(r));
            out["residuals"] = res;
        }
        if (rep.stopped) out["stopped"] = *rep.stopped;
        print_json(out);
        break;
    }
    case Format::table:
        std::cout << "P  V  L  delta\n";
        for (const auto& c : rep.counts)
            std::cout << c.P << "  " << c.V.get_str() << "  " << c.L.get_str() << "  " << c.delta.get_str() << '\n';
        if (rep.slope)
            std::cout << "slope " << fixed(*rep.slope) << " (~" << to_string(*rep.slope_rational) << ") over "
                      << rep.fit_points << " points\n";
        else
            std::cout << "no slope: " << rep.fit_points << " positive deltas (need 3)\n";
        break;
    }
    if (rep.stopped) {
        std::cerr << "survey stopped early: " << *rep.stopped << '\n';
        return 3;
    }
    return 0;
}

struct SmallestArgs {
    SystemArgs system;
    unsigned long pmax = 10;
};

int cmd_smallest(const RunConfig& cfg, const SmallestArgs& a) {
    const auto spec = a.system.spec();
    const auto found = smallest_nontrivial(spec, a.pmax, cfg.count_options());
    switch (cfg.fmt()) {
    case Format::csv:
        std::cout << "P_min," << csv_header(spec) << '\n';
        if (found) std::cout << found->P << ',' << to_csv_row(found->witness) << '\n';
        break;
    case Format::json: {
        Json out{{"variant", std::string(to_string(spec.variant))}, {"k", spec.k}, {"d", spec.d}, {"P_cap", a.pmax}};
        if (found) {
            out["P_min"] = found->P;
            out["witness"] = found->witness.entries();
        } else {
            out["P_min"] = nullptr;
        }
        print_json(out);
        break;
    }
    case Format::table:
        if (found)
            std::cout << "P_min " << found->P << "\nwitness " << to_csv_row(found->witness) << '\n';
        else
            std::cout << "none up to P=" << a.pmax << '\n';
        break;
    }
    return 0;
}

// upsilon -------------------------------------------------------------------

struct UpsilonArgs {
    unsigned k = 2;
    bool verify_identity = false;
};

int cmd_upsilon(const RunConfig& cfg, const UpsilonArgs& a) {
    const auto res = construct_upsilon(a.k, cfg.seed);
    std::optional<Integer> C;
    if (a.verify_identity) C = factor_identity_constant(a.k, res.poly);

    switch (cfg.fmt()) {
    case Format::csv:
        std::cout << "k,basis_size,nullspace_dim,terms,upsilon,C\n"
                  << a.k << ',' << res.basis_size << ',' << res.nullspace_dim << ',' << res.poly.size() << ",\""
                  << pretty(res.poly) << "\"," << (C ? C->get_str() : "") << '\n';
        break;
    case Format::json: {
        Json out{{"k", a.k},
                 {"basis_size", res.basis_size},
                 {"nullspace_dim", res.nullspace_dim},
                 {"normalization", upsilon_normalization},
                 {"upsilon", pretty(res.poly)},
                 {"poly", Json::parse(to_json(res.poly).dump())}};
        if (C) out["C"] = C->get_str();
        print_json(out);
        break;
    }
    case Format::table:
        std::cout << "Upsilon_" << a.k << " = " << pretty(res.poly) << "\nbasis " << res.basis_size << "  nullspace "
                  << res.nullspace_dim << "  terms " << res.poly.size() << '\n';
        if (C) std::cout << "identity verified: C = " << C->get_str() << '\n';
        break;
    }
    return 0;
}

// cascade -------------------------------------------------------------------

struct CascadeArgs {
    unsigned k = 2;
    unsigned r = 3;
    std::string solution;
    std::string P;
};

int cmd_cascade(const RunConfig& cfg, const CascadeArgs& a) {
    const IntVector z = parse_integers(a.solution);
    require(z.size() == 2 * static_cast<std::size_t>(a.k) + 2,
            "--solution must have 2k+2 = " + std::to_string(2 * a.k + 2) + " entries");
    std::optional<Integer> P;
    if (!a.P.empty()) P = parse_integer(a.P);

    const auto rel = verify_product_relations(z, a.k);
    if (!rel.holds())
        throw CheckFailed("product relations fail (halves " + flag(rel.halves) + ", swapped " + flag(rel.swapped) +
                          ", first_two " + flag(rel.first_two) + ")");
    const auto u = build_u(z, a.r, P);
    const auto dec = gcd_cascade(u);
    const auto ap = a_products(dec);
    const auto back = reconstruct_solution(u.z_prefix, u);
    if (back != z) throw CheckFailed("reconstruction does not return the input solution");

    switch (cfg.fmt()) {
    case Format::json: {
        Json rows = Json::array();
        for (const auto& row : u.rows) rows.push_back(integers_json(row));
        print_json({{"k", a.k},
                    {"r", u.r},
                    {"kappa", u.kappa},
                    {"P", u.P.get_str()},
                    {"product_relations", true},
                    {"u0", integers_json(u.u0)},
                    {"rows", rows},
                    {"column_product", u.column_product(0).get_str()},
                    {"decomposition", Json::parse(to_json(dec).dump())},
                    {"A", integers_json(ap.A)},
                    {"witness_p", ap.witness},
                    {"reconstruction", join_integers(back)}});
        break;
    }
    case Format::csv:
        std::cout << "k,r,kappa,P,u0,column_product,A,witness_p,reconstruction_ok\n"
                  << a.k << ',' << u.r << ',' << u.kappa << ',' << u.P.get_str() << ",\"" << join_integers(u.u0)
                  << "\"," << u.column_product(0).get_str() << ",\"" << join_integers(ap.A) << "\"," << ap.witness
                  << ",true\n";
        break;
    case Format::table:
        std::cout << "product relations: ok\n"
                  << "r " << u.r << "  kappa " << u.kappa << "  P " << u.P.get_str() << '\n'
                  << "u0 (" << join_integers(u.u0, ", ") << ")\n";
        for (unsigned l = 1; l <= u.kappa; ++l) std::cout << "u" << l << " (" << join_integers(u.rows[l - 1], ", ") << ")\n";
        std::cout << "column product " << u.column_product(0).get_str() << '\n'
                  << "gcd cascade: " << dec.alphas.size() << " factors, reconstruction exact\n"
                  << "A (" << join_integers(ap.A, ", ") << ")  witness p=" << ap.witness << "  A_p^r <= (2P)^kappa = "
                  << ipow(dec.row_bound, dec.kappa).get_str() << '\n'
                  << "reconstruction OK: (" << join_integers(back, ", ") << ")\n";
        break;
    }
    return 0;
}

// discrete-min / psi --------------------------------------------------------

struct DiscreteMinArgs {
    std::string lambda;
    std::string range;
};

int cmd_discrete_min(const RunConfig& cfg, const DiscreteMinArgs& a) {
    const Rational lambda = parse_rational(a.lambda);
    auto res = discrete_min(lambda);
    std::optional<DiscreteMin> restricted;
    if (!a.range.empty()) {
        const auto [lo, hi] = parse_range(a.range);
        restricted = discrete_min_restricted(lambda, lo, hi);
    }
    auto argmins = [](const DiscreteMin& d) {
        IntVector v(d.argmin.begin(), d.argmin.end());
        return v;
    };

    switch (cfg.fmt()) {
    case Format::json: {
        Json out{{"lambda", to_string(lambda)},
                 {"argmin_r", integers_json(argmins(res))},
                 {"value", to_string(res.value)},
                 {"value_sq", to_string(res.value_sq)},
                 {"bound_sq", to_string(res.bound_sq)},
                 {"bound_holds", res.bound_holds},
                 {"equality", res.equality},
                 {"pronic", res.pronic}};
        if (restricted) {
            out["restricted"] = {{"range", a.range},
                                 {"argmin_r", integers_json(argmins(*restricted))},
                                 {"value", to_string(restricted->value)},
                                 {"differs", restricted->value != res.value}};
        }
        print_json(out);
        break;
    }
    case Format::csv:
        std::cout << "lambda,argmin_r,value,value_sq,bound_sq,bound_holds,equality,pronic\n"
                  << to_string(lambda) << ",\"" << join_integers(argmins(res)) << "\"," << to_string(res.value) << ','
                  << to_string(res.value_sq) << ',' << to_string(res.bound_sq) << ',' << flag(res.bound_holds) << ','
                  << flag(res.equality) << ',' << flag(res.pronic) << '\n';
        break;
    case Format::table:
        std::cout << "lambda " << to_string(lambda) << "\nargmin r " << join_integers(argmins(res), " ") << "\nvalue "
                  << to_string(res.value) << "\nvalue^2 " << to_string(res.value_sq) << " vs 4*lambda+1 "
                  << to_string(res.bound_sq) << "\n" << (res.equality ? "equality" : "strict")
                  << (res.pronic ? " (lambda = m(m-1))" : "") << '\n';
        if (restricted)
            std::cout << "restricted to " << a.range << ": value " << to_string(restricted->value)
                      << (restricted->value != res.value ? " (differs)" : " (same)") << '\n';
        break;
    }
    if (!res.bound_holds || res.equality != res.pronic)
        throw CheckFailed("discrete AM-GM check failed for lambda=" + to_string(lambda));
    return 0;
}

struct PsiArgs {
    unsigned k = 2;
    unsigned r = 3;
    std::string prefix;
    unsigned long pmax = 6;
};

int cmd_psi(const RunConfig& cfg, const PsiArgs& a) {
    const IntVector prefix = parse_integers(a.prefix);
    const Integer n = count_psi(prefix, a.k, a.r, a.pmax);
    switch (cfg.fmt()) {
    case Format::json:
        print_json({{"k", a.k}, {"r", a.r}, {"prefix", integers_json(prefix)}, {"P", a.pmax}, {"psi", n.get_str()}});
        break;
    case Format::csv:
        std::cout << "k,r,prefix,P,psi\n"
                  << a.k << ',' << a.r << ",\"" << join_integers(prefix) << "\"," << a.pmax << ',' << n.get_str() << '\n';
        break;
    case Format::table:
        std::cout << "Psi(P=" << a.pmax << "; " << join_integers(prefix) << ") = " << n.get_str() << '\n';
        break;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact experiments on odd power sum systems: counts, cascades and exponents"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--threads", cfg.threads, "worker threads for counting")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--memory-budget", cfg.memory_budget, "refuse counts whose estimate exceeds this many bytes")
        ->capture_default_str();
    app.add_option("--cache", cfg.cache_dir, "directory holding the counts journal");
    app.add_option("--format", cfg.format, "table | json | csv")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for polynomial sample points")->capture_default_str();

    std::function<int()> run;

    ExponentsArgs ex;
    auto* c_ex = app.add_subcommand("exponents", "alpha_k (or alpha_kd) and beta_k with exact bound checks");
    c_ex->add_option("--k", ex.k, "k or a..b")->capture_default_str();
    c_ex->add_option("--d", ex.d, "inner exponent d")->capture_default_str();
    c_ex->callback([&] { run = [&] { return cmd_exponents(cfg, ex); }; });

    CountArgs ca;
    auto* c_count = app.add_subcommand("count", "exact V, L and V - L for one box");
    add_system_options(c_count, ca.system);
    c_count->add_option("--pmax", ca.pmax, "box size P")->capture_default_str();
    c_count->add_option("--list", ca.list_file, "write non-trivial solutions to this CSV file");
    c_count->add_option("--limit", ca.limit, "at most this many listed records (0 = all)")->capture_default_str();
    c_count->callback([&] { run = [&] { return cmd_count(cfg, ca); }; });

    SurveyArgs sa;
    auto* c_survey = app.add_subcommand("survey", "counts along a ladder of P with a log-log fit of V - L");
    add_system_options(c_survey, sa.system);
    c_survey->add_option("--ladder", sa.ladder, "comma separated P values")->capture_default_str();
    c_survey->callback([&] { run = [&] { return cmd_survey(cfg, sa); }; });

    SmallestArgs sm;
    auto* c_small = app.add_subcommand("smallest", "smallest P with a non-trivial solution, up to --pmax");
    add_system_options(c_small, sm.system);
    c_small->add_option("--pmax", sm.pmax, "largest P searched")->capture_default_str();
    c_small->callback([&] { run = [&] { return cmd_smallest(cfg, sm); }; });

    UpsilonArgs ua;
    auto* c_ups = app.add_subcommand("upsilon", "the weighted-homogeneous relation among k odd power sums");
    c_ups->add_option("--k", ua.k, "k")->capture_default_str();
    c_ups->add_flag("--verify-identity", ua.verify_identity, "expand and factor over the pairwise sums");
    c_ups->callback([&] { run = [&] { return cmd_upsilon(cfg, ua); }; });

    CascadeArgs cas;
    auto* c_cas = app.add_subcommand("cascade", "u-variables, gcd cascade and reconstruction for one solution");
    c_cas->add_option("--k", cas.k, "k")->capture_default_str();
    c_cas->add_option("--r", cas.r, "prefix length r")->capture_default_str();
    c_cas->add_option("--solution", cas.solution, "2k+2 comma separated integers")->required();
    c_cas->add_option("--P", cas.P, "box bound (default max |z_i|)");
    c_cas->callback([&] { run = [&] { return cmd_cascade(cfg, cas); }; });

    DiscreteMinArgs dm;
    auto* c_dm = app.add_subcommand("discrete-min", "min over positive integers r of r + lambda/r");
    c_dm->add_option("--lambda", dm.lambda, "positive rational: p, p/q or decimal")->required();
    c_dm->add_option("--range", dm.range, "also minimise over lo..hi only");
    c_dm->callback([&] { run = [&] { return cmd_discrete_min(cfg, dm); }; });

    PsiArgs pa;
    auto* c_psi = app.add_subcommand("psi", "brute-force count of u-rows for a fixed prefix");
    c_psi->add_option("--k", pa.k, "k")->capture_default_str();
    c_psi->add_option("--r", pa.r, "prefix length r")->capture_default_str();
    c_psi->add_option("--prefix", pa.prefix, "r comma separated integers")->required();
    c_psi->add_option("--pmax", pa.pmax, "box size P")->capture_default_str();
    c_psi->callback([&] { run = [&] { return cmd_psi(cfg, pa); }; });

    // every long flag can be set from PAUCITY_<NAME>, e.g. --memory-budget from PAUCITY_MEMORY_BUDGET
    auto bind_env = [](CLI::App* cmd) {
        for (auto* opt : cmd->get_options()) {
            if (opt->get_lnames().empty() || opt->get_lnames().front() == "help" ||
                opt->get_lnames().front() == "version" || !opt->get_envname().empty())
                continue;
            std::string name = "PAUCITY_";
            for (char ch : opt->get_lnames().front()) name += ch == '-' ? '_' : static_cast<char>(std::toupper(ch));
            opt->envname(name);
        }
    };
    bind_env(&app);
    for (auto* cmd : app.get_subcommands({})) bind_env(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        return run();
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return 1;
    } catch (const BudgetError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        std::cerr << Json{{"error", "budget"}, {"required", e.required()}, {"budget", e.budget()}}.dump() << '\n';
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IntegrityError& e) {
        std::cerr << "cache integrity: " << e.what() << '\n';
        return 4;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
