// fgdensity: exact and Monte Carlo densities of gcd-defined subsets of
// free groups and lattices, as CSV/JSON tables or gnuplot-ready data.
//
// Subcommands: lattice-density, zeta, group-series, test-elements,
// llt-check, expected-gcd, sample, oracle-check.
// Exit codes: 0 success, 1 oracle mismatch, 2 validation error,
// 3 resource budget exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fgd/count_table.hpp"
#include "fgd/group_density.hpp"
#include "fgd/lattice.hpp"
#include "fgd/report.hpp"
#include "fgd/sampler.hpp"
#include "fgd/words.hpp"

namespace {

struct CommonOpts {
    std::string format = "csv";
    std::string out;
    int threads = 0;
    std::uint64_t budget = 0;  // memory budget in bytes; resolved below
    std::uint64_t max_points = 1ULL << 34;
};

std::uint64_t default_budget() {
    if (const char* env = std::getenv("FGD_MEMORY_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 2ULL << 30;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool plottable) {
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember(plottable ? std::vector<std::string>{"csv", "json", "plot-data"}
                                        : std::vector<std::string>{"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out, "output file (prefix for plot-data)");
    cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--budget", c.budget, "memory budget in bytes for table builds");
    cmd->add_option("--max-points", c.max_points, "point budget for lattice scans")
        ->capture_default_str();
}

// Emit a finished table in the requested format.  For plot-data, x_col/y_col
// select the two columns; rows with an empty y cell are dropped.
int emit(const CommonOpts& c, fgd::ReportTable& table, std::size_t x_col, std::size_t y_col,
         double target, bool has_target) {
    if (c.format == "plot-data") {
        if (c.out.empty()) {
            std::cerr << "plot-data needs --out PREFIX\n";
            return 2;
        }
        fgd::ReportTable filtered = table;
        filtered.rows.clear();
        for (auto& row : table.rows)
            if (!row[y_col].empty()) filtered.rows.push_back(row);
        fgd::write_plot_data(c.out, filtered, x_col, y_col, target, has_target);
        std::cerr << "wrote " << c.out << ".dat and " << c.out << ".gp\n";
        return 0;
    }
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) {
            std::cerr << "cannot open " << c.out << "\n";
            return 2;
        }
        os = &file;
    }
    if (c.format == "json") fgd::write_json(*os, table);
    else fgd::write_csv(*os, table);
    return 0;
}

fgd::GcdClassSet parse_set(const std::string& text) {
    if (text == "visible") return fgd::GcdClassSet::visible();
    if (text == "all") return fgd::GcdClassSet::all_finite();
    if (text.rfind("le:", 0) == 0)
        return fgd::GcdClassSet::all_up_to(std::stoull(text.substr(3)));
    if (text.rfind("t:", 0) == 0)
        return fgd::GcdClassSet::t_visible(std::stoull(text.substr(2)));
    std::vector<std::uint64_t> ts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        ts.push_back(std::stoull(item));
    }
    if (ts.empty()) throw CLI::ValidationError("--set", "cannot parse gcd-class set: " + text);
    return fgd::GcdClassSet::finite_values(std::move(ts));
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

void table_progress(int level, int n_max) {
    if (n_max >= 60 && (level % 50 == 0 || level == n_max))
        std::cerr << "table level " << level << "/" << n_max << "\n";
}

fgd::CountTable build_table(int k, int n_max, const CommonOpts& c) {
    fgd::BuildOptions opts;
    opts.threads = c.threads;
    opts.memory_budget = c.budget ? c.budget : default_budget();
    opts.progress = table_progress;
    return fgd::CountTable::build(k, n_max, opts);
}

// ---- subcommands --------------------------------------------------------

int run_lattice_density(int k, std::uint64_t t, const std::string& set_text,
                        const std::string& p_text, double r, const std::string& r_list,
                        int steps, const CommonOpts& c) {
    const fgd::GcdClassSet S = set_text.empty() ? fgd::GcdClassSet::t_visible(t)
                                                : parse_set(set_text);
    fgd::NormSelector norm = fgd::NormSelector::linf();
    if (p_text != "inf") norm = fgd::NormSelector::lp(std::stod(p_text));

    std::vector<double> radii;
    if (!r_list.empty()) {
        for (int v : parse_int_list(r_list)) radii.push_back(v);
    } else {
        for (int i = 1; i <= steps; ++i)
            radii.push_back(std::floor(r * i / steps));
        if (radii.empty() || radii.back() != r) radii.push_back(r);
    }

    const double theo = fgd::gcd_class_set_density(k, S, 1e-12);
    fgd::ReportTable table;
    table.config = {{"subcommand", "lattice-density"}, {"k", std::to_string(k)},
                    {"set", S.description},            {"p", p_text},
                    {"r", fgd::decimal_string(r)},     {"format", c.format}};
    table.columns = {"r", "hits", "total", "density", "density_decimal", "theoretical",
                     "abs_error"};
    for (double radius : radii) {
        if (!(radius >= 1)) continue;
        auto bc = fgd::count_in_ball(k, norm, radius, S, c.threads, c.max_points);
        table.rows.push_back({fgd::decimal_string(radius), std::to_string(bc.hits),
                              std::to_string(bc.total),
                              fgd::rational_string(mpz_class(static_cast<unsigned long>(bc.hits)),
                                                   mpz_class(static_cast<unsigned long>(bc.total))),
                              fgd::decimal_string(bc.density()), fgd::decimal_string(theo),
                              fgd::decimal_string(std::abs(bc.density() - theo))});
    }
    return emit(c, table, 0, 4, theo, true);
}

int run_zeta(int k, double eps, const CommonOpts& c) {
    fgd::ReportTable table;
    table.config = {{"subcommand", "zeta"}, {"k", std::to_string(k)},
                    {"eps", fgd::decimal_string(eps)}, {"format", c.format}};
    table.columns = {"k", "eps", "zeta", "exact"};
    const double v = fgd::zeta(k, eps);
    table.rows.push_back({std::to_string(k), fgd::decimal_string(eps), fgd::decimal_string(v),
                          k == 2 ? "pi^2/6 = " + fgd::decimal_string(fgd::zeta2_exact()) : ""});
    return emit(c, table, 0, 2, 0, false);
}

void series_rows(const fgd::DensitySeries& series, fgd::ReportTable& table) {
    table.columns = {"n",      "hits",      "total",        "s",        "s_decimal",
                     "q",      "q_decimal", "ball",         "ball_decimal",
                     "target", "q_abs_error"};
    for (const auto& row : series.rows) {
        std::string q, q_dec, q_err;
        if (row.annular) {
            q = fgd::rational_string(*row.annular);
            q_dec = fgd::decimal_string(*row.annular);
            q_err = fgd::decimal_string(
                std::abs(row.annular->get_d() - series.theoretical_annular));
        }
        table.rows.push_back({std::to_string(row.n), row.hits.get_str(), row.total.get_str(),
                              fgd::rational_string(row.hits, row.total),
                              fgd::decimal_string(row.spherical), q, q_dec,
                              fgd::rational_string(row.ball_hits, row.ball_total),
                              fgd::decimal_string(row.ball),
                              fgd::decimal_string(series.theoretical_annular), q_err});
    }
}

int run_group_series(int k, const std::string& set_text, int n_max, const CommonOpts& c) {
    const fgd::GcdClassSet S = parse_set(set_text);
    auto table = build_table(k, n_max, c);
    auto series = fgd::spherical_series(table, S, n_max);
    fgd::ReportTable out;
    out.config = {{"subcommand", "group-series"}, {"k", std::to_string(k)},
                  {"set", S.description},         {"n_max", std::to_string(n_max)},
                  {"format", c.format}};
    series_rows(series, out);
    return emit(c, out, 0, 6, series.theoretical_annular, true);
}

int run_test_elements(int n_max, bool exact, const std::string& word_text,
                      const CommonOpts& c) {
    if (!word_text.empty()) {
        const fgd::Word w = fgd::Word::parse(2, word_text);
        const auto verdict = fgd::is_test_element_rank2(w);
        fgd::ReportTable out;
        out.config = {{"subcommand", "test-elements"}, {"word", w.str()}, {"format", c.format}};
        out.columns = {"word", "is_test", "reason", "root", "exponent", "root_gcd"};
        out.rows.push_back({w.str(), verdict.is_test ? "true" : "false", verdict.reason_str(),
                            verdict.root.str(), std::to_string(verdict.exponent),
                            verdict.root_class.str()});
        return emit(c, out, 0, 1, 0, false);
    }
    fgd::DensitySeries series;
    if (exact) {
        series = fgd::test_element_series_exact(n_max);
    } else {
        auto table = build_table(2, n_max, c);
        series = fgd::test_element_series(table, n_max, c.threads);
    }
    fgd::ReportTable out;
    out.config = {{"subcommand", "test-elements"},
                  {"n_max", std::to_string(n_max)},
                  {"mode", exact ? "exact-enumeration" : "hybrid"},
                  {"format", c.format}};
    series_rows(series, out);
    return emit(c, out, 0, 6, series.theoretical_annular, true);
}

int run_llt_check(int k, const std::string& n_list, double sigma2, double c_tail,
                  int dump_level, const CommonOpts& c) {
    const std::vector<int> ns = parse_int_list(n_list);
    if (ns.empty()) throw CLI::ValidationError("--n-list", "no levels given");
    int n_top = dump_level;
    for (int n : ns) n_top = std::max(n_top, n);
    auto table = build_table(k, n_top, c);

    if (dump_level >= 0) {
        fgd::ReportTable out;
        out.config = {{"subcommand", "llt-check"}, {"k", std::to_string(k)},
                      {"dump_marginals", std::to_string(dump_level)}, {"format", c.format}};
        for (int i = 1; i <= k; ++i) out.columns.push_back("z" + std::to_string(i));
        out.columns.push_back("count");
        table.for_each_marginal(dump_level, [&](std::span<const std::int64_t> z,
                                                const mpz_class& cnt) {
            if (sgn(cnt) == 0) return;
            std::vector<std::string> row;
            for (auto v : z) row.push_back(std::to_string(v));
            row.push_back(cnt.get_str());
            out.rows.push_back(std::move(row));
        });
        return emit(c, out, 0, static_cast<std::size_t>(k), 0, false);
    }

    const double s2 = sigma2 > 0 ? sigma2 : fgd::default_sigma2(k);
    fgd::ReportTable out;
    out.config = {{"subcommand", "llt-check"},      {"k", std::to_string(k)},
                  {"n_list", n_list},               {"sigma2", fgd::decimal_string(s2)},
                  {"c", fgd::decimal_string(c_tail)}, {"format", c.format}};
    out.columns = {"n", "sup_error", "second_moment_ratio", "tail_mass", "tail_mass_decimal"};
    for (int n : ns) {
        const auto tail = table.tail_mass(n, c_tail);
        const mpq_class ratio = table.second_moment(n) / n;
        out.rows.push_back({std::to_string(n), fgd::decimal_string(table.llt_sup_error(n, s2)),
                            fgd::decimal_string(ratio), fgd::rational_string(tail),
                            fgd::decimal_string(tail)});
    }
    return emit(c, out, 0, 1, 0, false);
}

int run_expected_gcd(int k, int n_max, const CommonOpts& c) {
    auto table = build_table(k, n_max, c);
    auto rows = fgd::expected_gcd_series(table, n_max);
    fgd::ReportTable out;
    out.config = {{"subcommand", "expected-gcd"}, {"k", std::to_string(k)},
                  {"n_max", std::to_string(n_max)}, {"format", c.format}};
    out.columns = {"n", "t_prime", "t_prime_decimal", "t", "t_decimal"};
    for (const auto& row : rows)
        out.rows.push_back({std::to_string(row.n), fgd::rational_string(row.t_prime),
                            fgd::decimal_string(row.t_prime), fgd::rational_string(*row.t_avg),
                            fgd::decimal_string(*row.t_avg)});
    return emit(c, out, 0, 4, 0, false);
}

int run_sample(int k, int n, const std::string& predicate, std::uint64_t samples,
               std::uint64_t seed, const CommonOpts& c) {
    std::function<bool(const fgd::Word&)> pred;
    if (predicate == "visible") pred = [](const fgd::Word& w) { return fgd::is_visible_word(w); };
    else if (predicate.rfind("t:", 0) == 0) {
        const std::uint64_t t = std::stoull(predicate.substr(2));
        pred = [t](const fgd::Word& w) { return fgd::is_t_visible_word(w, t); };
    } else if (predicate == "test") {
        if (k != 2) throw CLI::ValidationError("--predicate", "test predicate needs k = 2");
        pred = [](const fgd::Word& w) { return fgd::is_test_element_rank2(w).is_test; };
    } else if (predicate == "even") {
        pred = [](const fgd::Word& w) { return w.length() % 2 == 0; };
    } else {
        throw CLI::ValidationError("--predicate", "unknown predicate: " + predicate);
    }

    auto est = fgd::mc_annular_estimate(k, n, pred, samples, seed, c.threads, predicate);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) {
            std::cerr << "cannot open " << c.out << "\n";
            return 2;
        }
        os = &file;
    }
    *os << "{\"n\": " << est.n << ", \"samples\": " << est.samples
        << ", \"estimate\": " << fgd::decimal_string(est.estimate)
        << ", \"se\": " << fgd::decimal_string(est.standard_error) << ", \"seed\": " << est.seed
        << ", \"predicate\": \"" << fgd::json_escape(predicate) << "\"}\n";
    return 0;
}

int run_oracle_check(int k, int n_max, const CommonOpts& c) {
    if (fgd::sphere_size(k, n_max) > 20'000'000)
        throw CLI::ValidationError("--n-max", "enumeration too large for the oracle check");
    auto table = build_table(k, n_max, c);
    bool all_ok = true;
    for (int n = 0; n <= n_max; ++n) {
        std::map<std::vector<std::int64_t>, unsigned long> hist;
        fgd::enumerate_sphere(k, n, [&](std::span<const fgd::Letter> ls) {
            std::vector<std::int64_t> z(static_cast<std::size_t>(k), 0);
            for (auto l : ls) z[static_cast<std::size_t>(l.generator() - 1)] += l.sign();
            ++hist[z];
        });
        bool ok = true;
        std::size_t nonzero = 0;
        table.for_each_marginal(n, [&](std::span<const std::int64_t> z, const mpz_class& cnt) {
            if (sgn(cnt) == 0) return;
            ++nonzero;
            auto it = hist.find(std::vector<std::int64_t>(z.begin(), z.end()));
            if (it == hist.end() || mpz_class(it->second) != cnt) ok = false;
        });
        if (nonzero != hist.size()) ok = false;
        std::cout << "n=" << n << " " << (ok ? "ok" : "MISMATCH") << " entries=" << hist.size()
                  << "\n";
        all_ok = all_ok && ok;
    }
    std::cout << (all_ok ? "oracle-check: all levels match" : "oracle-check: MISMATCH") << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and sampled densities in free groups and Z^k"};
    app.require_subcommand(1);

    CommonOpts c_lat, c_zeta, c_series, c_test, c_llt, c_gcd, c_sample, c_oracle;

    // lattice-density
    auto* lat = app.add_subcommand("lattice-density", "gcd-class densities in L_p balls of Z^k");
    int lat_k = 2;
    std::uint64_t lat_t = 1;
    std::string lat_set, lat_p = "inf", lat_rlist;
    double lat_r = 1000;
    int lat_steps = 10;
    lat->add_option("--k", lat_k, "lattice rank")->capture_default_str();
    lat->add_option("--t", lat_t, "gcd class (t-visible points)")->capture_default_str();
    lat->add_option("--set", lat_set, "gcd-class set: visible|all|le:N|t:N|comma list");
    lat->add_option("--p", lat_p, "norm: inf or a real p >= 1")->capture_default_str();
    lat->add_option("--r", lat_r, "largest radius")->capture_default_str();
    lat->add_option("--r-list", lat_rlist, "explicit comma-separated radii");
    lat->add_option("--steps", lat_steps, "number of radius steps up to r")->capture_default_str();
    add_common(lat, c_lat, true);

    // zeta
    auto* zet = app.add_subcommand("zeta", "Riemann zeta at an integer with error bound");
    int zeta_k = 2;
    double zeta_eps = 1e-9;
    zet->add_option("--k", zeta_k, "argument (integer >= 2)")->capture_default_str();
    zet->add_option("--eps", zeta_eps, "absolute error bound")->capture_default_str();
    add_common(zet, c_zeta, false);

    // group-series
    auto* ser = app.add_subcommand("group-series",
                                   "exact spherical/annular/ball series for a gcd-class set");
    int ser_k = 2, ser_nmax = 200;
    std::string ser_set = "visible";
    ser->add_option("--k", ser_k, "free group rank")->capture_default_str();
    ser->add_option("--set", ser_set, "gcd-class set: visible|all|le:N|t:N|comma list")
        ->capture_default_str();
    ser->add_option("--n-max", ser_nmax, "largest word length")->capture_default_str();
    add_common(ser, c_series, true);

    // test-elements
    auto* tst = app.add_subcommand("test-elements",
                                   "rank-2 test element series or a single-word verdict");
    int tst_nmax = 200, tst_k = 2;
    bool tst_exact = false;
    std::string tst_word;
    tst->add_option("--k", tst_k, "must be 2")->capture_default_str();
    tst->add_option("--n-max", tst_nmax, "largest word length")->capture_default_str();
    tst->add_flag("--exact", tst_exact, "classify every word by enumeration (n <= 14)");
    tst->add_option("--word", tst_word, "classify one word, e.g. abAB");
    add_common(tst, c_test, true);

    // llt-check
    auto* llt = app.add_subcommand("llt-check",
                                   "local limit theorem: sup errors, moments, tail mass");
    int llt_k = 2, llt_dump = -1;
    std::string llt_nlist = "40,80,160";
    double llt_sigma2 = 0, llt_c = 5.0;
    llt->add_option("--k", llt_k, "free group rank")->capture_default_str();
    llt->add_option("--n-list", llt_nlist, "comma-separated levels")->capture_default_str();
    llt->add_option("--sigma2", llt_sigma2, "Gaussian variance (default 1/(k-1))");
    llt->add_option("--c", llt_c, "tail radius in units of sqrt(n)")->capture_default_str();
    llt->add_option("--dump-marginals", llt_dump, "emit the N_n(z) marginal table for level n");
    add_common(llt, c_llt, false);

    // expected-gcd
    auto* egc = app.add_subcommand("expected-gcd", "expected gcd statistic over spheres");
    int egc_k = 2, egc_nmax = 100;
    egc->add_option("--k", egc_k, "free group rank")->capture_default_str();
    egc->add_option("--n-max", egc_nmax, "largest word length")->capture_default_str();
    add_common(egc, c_gcd, false);

    // sample
    auto* smp = app.add_subcommand("sample", "Monte Carlo annular estimate for a predicate");
    int smp_k = 2, smp_n = 200;
    std::string smp_pred = "visible";
    std::uint64_t smp_samples = 1'000'000, smp_seed = 1;
    smp->add_option("--k", smp_k, "free group rank")->capture_default_str();
    smp->add_option("--n", smp_n, "annular pair (n-1, n)")->capture_default_str();
    smp->add_option("--predicate", smp_pred, "visible|t:N|test|even")->capture_default_str();
    smp->add_option("--samples", smp_samples, "even sample count")->capture_default_str();
    smp->add_option("--seed", smp_seed, "64-bit master seed")->capture_default_str();
    add_common(smp, c_sample, false);

    // oracle-check
    auto* orc = app.add_subcommand("oracle-check",
                                   "verify the count table against full enumeration");
    int orc_k = 2, orc_nmax = 10;
    orc->add_option("--k", orc_k, "free group rank")->capture_default_str();
    orc->add_option("--n-max", orc_nmax, "largest level to verify")->capture_default_str();
    add_common(orc, c_oracle, false);

    try {
        app.parse(argc, argv);
        if (lat->parsed()) {
            if (!lat_set.empty() && lat->count("--t"))
                throw CLI::ValidationError("--set", "--t and --set are mutually exclusive");
            return run_lattice_density(lat_k, lat_t, lat_set, lat_p, lat_r, lat_rlist, lat_steps,
                                       c_lat);
        }
        if (zet->parsed()) return run_zeta(zeta_k, zeta_eps, c_zeta);
        if (ser->parsed()) return run_group_series(ser_k, ser_set, ser_nmax, c_series);
        if (tst->parsed()) {
            if (tst_k != 2)
                throw CLI::ValidationError("--k", "test elements are characterized for k = 2 only");
            return run_test_elements(tst_nmax, tst_exact, tst_word, c_test);
        }
        if (llt->parsed()) return run_llt_check(llt_k, llt_nlist, llt_sigma2, llt_c, llt_dump, c_llt);
        if (egc->parsed()) return run_expected_gcd(egc_k, egc_nmax, c_gcd);
        if (smp->parsed()) return run_sample(smp_k, smp_n, smp_pred, smp_samples, smp_seed, c_sample);
        if (orc->parsed()) return run_oracle_check(orc_k, orc_nmax, c_oracle);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nrun with --help for usage\n";
        return 2;
    } catch (const fgd::ResourceError& e) {
        std::cerr << "resource budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "out of range: " << e.what() << "\n";
        return 2;
    }
}
