#include "fibosc/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fibosc/birthdeath.hpp"
#include "fibosc/coupling.hpp"
#include "fibosc/dynamics.hpp"
#include "fibosc/spectral.hpp"

namespace fibosc::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int exit_code(const Error& e) {
    return e.kind() == ErrorKind::validation ? kExitValidation : kExitNumerical;
}

DeformationParams params_from(const RunConfig& cfg) {
    if (!cfg.r || !cfg.q || !cfg.beta)
        throw DegenerateParams("r, q and beta are required (flags or config file)");
    return DeformationParams(*cfg.r, *cfg.q, *cfg.beta);
}

// Region gate with the spec's diagnostic style ("r+q >= 1 required, got 0.9").
void require_region(const DeformationParams& p, char region) {
    std::string msg = region_diagnostic(p, region);
    if (!msg.empty())
        throw RegionViolation(msg);
}

void require_nondegenerate_rates(const DeformationParams& p) {
    if (p.r + p.q <= 1.0)
        throw DegenerateParams("r+q > 1 required (rates diverge at the r+q = 1 boundary), got " +
                               std::to_string(p.r + p.q));
}

std::string csv_or_empty(double v) {
    return std::isfinite(v) ? num17(v) : std::string{};
}

std::string json_or_null(double v) {
    return std::isfinite(v) ? num17(v) : std::string{"null"};
}

// Run `body` with output directed at cfg.out (or the provided stream); all
// fibosc errors map onto the documented exit codes with a stderr diagnostic.
int guarded(const RunConfig& cfg, std::ostream& os, std::ostream& err,
            const std::function<void(std::ostream&)>& body) {
    try {
        if (!cfg.out.empty()) {
            std::ofstream f(cfg.out);
            if (!f)
                throw DegenerateParams("cannot open output file: " + cfg.out);
            body(f);
        } else {
            body(os);
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "fibosc: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "fibosc: " << e.what() << "\n";
        return kExitNumerical;
    }
}

std::vector<double> linspace(const Range& r) {
    std::vector<double> v;
    if (r.count <= 0)
        return v;
    if (r.count == 1) {
        v.push_back(r.start);
        return v;
    }
    v.reserve(r.count);
    for (int i = 0; i < r.count; ++i)
        v.push_back(r.start + (r.stop - r.start) * i / (r.count - 1));
    return v;
}

Range parse_range(const std::string& text) {
    Range r;
    char sep1 = 0, sep2 = 0;
    std::istringstream is(text);
    if (!(is >> r.start >> sep1 >> r.stop >> sep2 >> r.count) || sep1 != ':' || sep2 != ':' ||
        r.count < 1)
        throw DegenerateParams("range must be start:stop:count, got '" + text + "'");
    return r;
}

struct SweepRow {
    std::string text;
};

std::string gap_csv_row(const DeformationParams& p, const GapReport& rep, const std::string& status) {
    std::ostringstream os;
    os << num17(p.r) << ',' << num17(p.q) << ',' << num17(p.beta) << ',' << status << ','
       << csv_or_empty(rep.offdiag_min) << ',' << rep.offdiag_argmin_j << ','
       << rep.offdiag_argmin_k << ',' << csv_or_empty(rep.diag_lower_strong) << ','
       << csv_or_empty(rep.diag_lower_weak) << ',' << csv_or_empty(rep.diag_upper_alpha) << ','
       << csv_or_empty(rep.diag_numeric) << ',' << csv_or_empty(rep.gap_formula_paper) << ','
       << csv_or_empty(rep.gap_numeric) << ','
       << (rep.paper_formula_below_numeric ? "true" : "false") << ','
       << (rep.alpha_below_diag_numeric ? "true" : "false");
    return os.str();
}

const char* kGapCsvHeader =
    "r,q,beta,status,offdiag_min,offdiag_argmin_j,offdiag_argmin_k,diag_lower_strong,"
    "diag_lower_weak,diag_upper_alpha,diag_numeric,gap_formula_paper,gap_numeric,"
    "consistency_flag,alpha_below_diag_numeric";

std::string empty_gap_csv_row(double r, double q, double beta, const std::string& status) {
    std::ostringstream os;
    os << num17(r) << ',' << num17(q) << ',' << num17(beta) << ',' << status
       << ",,,,,,,,,,false,false";
    return os.str();
}

} // namespace

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw DegenerateParams("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (eq == std::string::npos)
            throw DegenerateParams("config line " + std::to_string(lineno) +
                                   ": expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "r")
                cfg.r = std::stod(val);
            else if (key == "q")
                cfg.q = std::stod(val);
            else if (key == "beta")
                cfg.beta = std::stod(val);
            else if (key == "levels")
                cfg.levels = std::stoi(val);
            else if (key == "t_max")
                cfg.t_max = std::stod(val);
            else if (key == "dt")
                cfg.dt = std::stod(val);
            else if (key == "format")
                cfg.format = val;
            else if (key == "out")
                cfg.out = val;
            else if (key == "workers")
                cfg.workers = std::stoi(val);
            else if (key == "init")
                cfg.init = val;
            else if (key == "figure")
                cfg.figure = std::stoi(val);
            else if (key == "bohr_tol")
                cfg.bohr_tol = std::stod(val);
            else if (key == "r_range")
                cfg.r_range = parse_range(val);
            else if (key == "q_range")
                cfg.q_range = parse_range(val);
            else if (key == "beta_range")
                cfg.beta_range = parse_range(val);
            else
                throw DegenerateParams("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw DegenerateParams("config line " + std::to_string(lineno) + ": bad value for '" +
                                   key + "'");
        }
    }
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        auto p = params_from(cfg);
        if (cfg.levels < 1)
            throw DegenerateParams("levels must be >= 1");
        auto table = SpectrumTable::build(p, cfg.levels);
        // truncated normalized weights, no tail gate: this is a table of the
        // first N levels, not an accuracy claim about the infinite state
        double z = 0.0;
        for (int n = 0; n < cfg.levels; ++n)
            z += std::exp(-p.beta * table.eps[n]);
        out << "n,eps,omega,pi_tilde,log_pi_tilde\n";
        for (int n = 0; n < cfg.levels; ++n) {
            double log_pt = -p.beta * table.eps[n] - std::log(z);
            out << n << ',' << num17(table.eps[n]) << ','
                << (n >= 1 ? num17(table.omega_at(n)) : std::string{}) << ','
                << num17(std::exp(log_pt)) << ',' << num17(log_pt) << '\n';
        }
    });
}

int cmd_rates(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        auto p = params_from(cfg);
        require_region(p, 'A');
        require_nondegenerate_rates(p);
        if (cfg.levels < 2)
            throw DegenerateParams("levels must be >= 2");
        auto table = SpectrumTable::build(p, cfg.levels);
        out << "n,eps,omega,gamma_minus,gamma_plus,lambda,mu\n";
        for (int n = 0; n < cfg.levels; ++n) {
            std::string omega, gm, gp, mu;
            if (n >= 1) {
                auto g = gamma_rates(table.omega_at(n), p.beta);
                omega = num17(table.omega_at(n));
                gm = num17(g.minus);
                gp = num17(g.plus);
                mu = num17(g.minus * table.eps[n]);
            }
            // lambda_n from the infinite chain (the reflecting truncation used
            // by the gap solver zeroes the top one; see README)
            double lam = gamma_rates(table.omega_at(n + 1), p.beta).plus * table.eps[n + 1];
            out << n << ',' << num17(table.eps[n]) << ',' << omega << ',' << gm << ',' << gp
                << ',' << num17(lam) << ',' << mu << '\n';
        }
    });
}

int cmd_bohr(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        auto p = params_from(cfg);
        if (cfg.levels < 2)
            throw DegenerateParams("levels must be >= 2");
        auto table = SpectrumTable::build(p, cfg.levels);
        auto spec = bohr_spectrum(table, cfg.bohr_tol);
        auto gen = is_generic(spec, table);
        out << "# generic = " << (gen.generic ? "true" : "false") << '\n';
        for (const auto& v : gen.multi_pair_classes)
            out << "# witness omega = " << num17(v.omega) << " pairs = " << v.pairs.size() << '\n';
        for (const auto& d : gen.degenerate_levels)
            out << "# degenerate levels " << d.first << " " << d.second << '\n';
        out << "omega,pair_count,pairs,touches_top\n";
        for (std::size_t c = 0; c < spec.omegas.size(); ++c) {
            std::ostringstream pairs;
            bool top = false;
            for (std::size_t i = 0; i < spec.pairs[c].size(); ++i) {
                const auto& pr = spec.pairs[c][i];
                if (i)
                    pairs << ';';
                pairs << pr.upper << ':' << pr.lower;
                top = top || pr.upper == cfg.levels - 1 || pr.lower == cfg.levels - 1;
            }
            out << num17(spec.omegas[c]) << ',' << spec.pairs[c].size() << ',' << pairs.str()
                << ',' << (top ? "true" : "false") << '\n';
        }
    });
}

int cmd_gap(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        auto p = params_from(cfg);
        require_region(p, 'A');
        require_nondegenerate_rates(p);
        auto rep = gap_report(p, cfg.levels);
        if (cfg.format == "json") {
            out << "{\n"
                << "  \"r\": " << num17(p.r) << ",\n"
                << "  \"q\": " << num17(p.q) << ",\n"
                << "  \"beta\": " << num17(p.beta) << ",\n"
                << "  \"levels\": " << cfg.levels << ",\n"
                << "  \"offdiag_min\": " << json_or_null(rep.offdiag_min) << ",\n"
                << "  \"offdiag_argmin\": [" << rep.offdiag_argmin_j << ", "
                << rep.offdiag_argmin_k << "],\n"
                << "  \"diag_lower_strong\": " << json_or_null(rep.diag_lower_strong) << ",\n"
                << "  \"diag_lower_weak\": " << json_or_null(rep.diag_lower_weak) << ",\n"
                << "  \"diag_upper_alpha\": " << json_or_null(rep.diag_upper_alpha) << ",\n"
                << "  \"diag_numeric\": " << json_or_null(rep.diag_numeric) << ",\n"
                << "  \"gap_formula_paper\": " << json_or_null(rep.gap_formula_paper) << ",\n"
                << "  \"gap_numeric\": " << json_or_null(rep.gap_numeric) << ",\n"
                << "  \"region_b\": " << (rep.region_b ? "true" : "false") << ",\n"
                << "  \"consistency_flag\": "
                << (rep.paper_formula_below_numeric ? "true" : "false") << ",\n"
                << "  \"alpha_below_diag_numeric\": "
                << (rep.alpha_below_diag_numeric ? "true" : "false") << "\n"
                << "}\n";
        } else if (cfg.format == "csv") {
            out << kGapCsvHeader << '\n' << gap_csv_row(p, rep, "ok") << '\n';
        } else {
            throw DegenerateParams("format must be csv or json, got '" + cfg.format + "'");
        }
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        auto p = params_from(cfg);
        require_region(p, 'A');
        require_nondegenerate_rates(p);
        auto gen = build_generator(p, cfg.levels);
        const int n = gen.dim;

        Eigen::MatrixXcd rho_inv = Eigen::MatrixXcd::Zero(n, n);
        {
            double z = 0.0;
            for (int i = 0; i < n; ++i)
                z += std::exp(-p.beta * gen.table.eps[i]);
            for (int i = 0; i < n; ++i)
                rho_inv(i, i) = std::exp(-p.beta * gen.table.eps[i]) / z;
        }

        Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(n, n);
        const std::string& init = cfg.init;
        if (init == "ground") {
            rho0(0, 0) = 1.0;
        } else if (init.rfind("level:", 0) == 0) {
            int lvl = std::stoi(init.substr(6));
            if (lvl < 0 || lvl >= n)
                throw DegenerateParams("init level outside truncation");
            rho0(lvl, lvl) = 1.0;
        } else if (init == "thermal") {
            rho0 = rho_inv;
        } else if (init == "thermal-perturbed") {
            rho0 = 0.99 * rho_inv;
            rho0(0, 0) += 0.01;
        } else if (init.rfind("coherence:", 0) == 0) {
            int j = 0, k = 0;
            char comma = 0;
            std::istringstream is(init.substr(10));
            if (!(is >> j >> comma >> k) || comma != ',' || j == k || j < 0 || k < 0 ||
                j >= n || k >= n)
                throw DegenerateParams("init coherence:j,k needs distinct in-range levels");
            rho0 = rho_inv;
            double c = 0.5 * std::sqrt(std::real(rho_inv(j, j)) * std::real(rho_inv(k, k)));
            rho0(j, k) += c;
            rho0(k, j) += c;
        } else {
            throw DegenerateParams("init must be ground | level:n | thermal | thermal-perturbed "
                                   "| coherence:j,k");
        }

        double dt = cfg.dt > 0.0 ? cfg.dt : 0.5 * stable_dt(gen);
        auto traj = evolve(gen, DensityMatrix{rho0}, cfg.t_max, dt);
        out << "t,trace,min_eig,trace_dist,l2_dist,rho_00,rho_11,re_rho_01,im_rho_01\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const auto& st = traj.states[i];
            out << num17(traj.times[i]) << ',' << num17(traj.traces[i]) << ','
                << num17(traj.min_eigenvalues[i]) << ',' << num17(traj.trace_distances[i]) << ','
                << num17(traj.l2_distances[i]) << ',' << num17(std::real(st(0, 0))) << ','
                << num17(std::real(st(1, 1))) << ',' << num17(std::real(st(0, 1))) << ','
                << num17(std::imag(st(0, 1))) << '\n';
        }
    });
}

int cmd_sweep(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        if (!cfg.r_range && !cfg.q_range && !cfg.beta_range)
            throw DegenerateParams("sweep needs at least one of --r-range/--q-range/--beta-range");
        const auto axis = [](const std::optional<Range>& range, const std::optional<double>& scalar,
                             const char* name) {
            if (range)
                return linspace(*range);
            if (scalar)
                return std::vector<double>{*scalar};
            throw DegenerateParams(std::string(name) + " needs a value or a range");
        };
        auto rs = axis(cfg.r_range, cfg.r, "r");
        auto qs = axis(cfg.q_range, cfg.q, "q");
        auto bs = axis(cfg.beta_range, cfg.beta, "beta");
        std::size_t total = rs.size() * qs.size() * bs.size();
        if (total > 1000000)
            throw DegenerateParams("sweep grid exceeds 1e6 points");

        std::vector<SweepRow> rows(total);
        const auto point = [&](std::size_t idx) {
            std::size_t bi = idx % bs.size();
            std::size_t qi = (idx / bs.size()) % qs.size();
            std::size_t ri = idx / (bs.size() * qs.size());
            double r = rs[ri], q = qs[qi], beta = bs[bi];
            try {
                DeformationParams p(r, q, beta);
                if (!p.region_a()) {
                    rows[idx].text = empty_gap_csv_row(r, q, beta, "region_violation");
                    return;
                }
                if (p.r + p.q <= 1.0) {
                    rows[idx].text = empty_gap_csv_row(r, q, beta, "degenerate");
                    return;
                }
                auto rep = gap_report(p, cfg.levels);
                rows[idx].text = gap_csv_row(p, rep, "ok");
            } catch (const Error& e) {
                rows[idx].text = empty_gap_csv_row(
                    r, q, beta,
                    e.kind() == ErrorKind::validation ? "degenerate" : "numerical_failure");
            }
        };

        int workers = std::max(1, cfg.workers);
        if (workers == 1) {
            for (std::size_t i = 0; i < total; ++i)
                point(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                        point(i);
                });
            for (auto& th : pool)
                th.join();
        }

        out << kGapCsvHeader << '\n';
        for (const auto& row : rows)
            out << row.text << '\n';
    });
}

int cmd_figure(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    return guarded(cfg, os, err, [&](std::ostream& out) {
        if (cfg.figure == 1) {
            // beta = 1.5, q = 1; weak diagonal bound vs off-diagonal minimum over r
            Range rr = cfg.r_range.value_or(Range{1.005, 4.0, 200});
            const double beta = 1.5, q = 1.0;
            out << "r,diag_lower,offdiag_min\n";
            for (double r : linspace(rr)) {
                DeformationParams p(r, q, beta);
                out << num17(r) << ',' << num17(-std::expm1(-2.0 * beta)) << ','
                    << num17(offdiag_min_closed_form(p)) << '\n';
            }
        } else if (cfg.figure == 2) {
            // r = 2; q defaults to 1 by analogy with figures 1 and 3
            Range br = cfg.beta_range.value_or(Range{0.05, 3.0, 200});
            const double r = cfg.r.value_or(2.0);
            const double q = cfg.q.value_or(1.0);
            out << "beta,diag_lower,offdiag_min\n";
            for (double beta : linspace(br)) {
                DeformationParams p(r, q, beta);
                out << num17(beta) << ',' << num17(-std::expm1(-2.0 * beta)) << ','
                    << num17(offdiag_min_closed_form(p)) << '\n';
            }
        } else if (cfg.figure == 3) {
            Range rr = cfg.r_range.value_or(Range{1.05, 4.0, 101});
            Range br = cfg.beta_range.value_or(Range{0.02, 8.0, 101});
            const double q = cfg.q.value_or(1.0);
            auto curves = crossing_curves(q, rr.start, rr.stop, br.start, br.stop, rr.count);
            out << "r,beta_upper,beta_lower\n";
            for (const auto& row : curves.rows) {
                out << num17(row.r) << ','
                    << (row.has_upper ? num17(row.beta_upper) : std::string{}) << ','
                    << (row.has_lower ? num17(row.beta_lower) : std::string{}) << '\n';
            }
        } else {
            throw DegenerateParams("figure must be 1, 2 or 3");
        }
    });
}

int run(int argc, char** argv) {
    RunConfig cfg;

    // --config is honored before flag parsing so flags override file values
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc)
            path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            path = arg.substr(9);
        if (!path.empty()) {
            try {
                load_config_file(cfg, path);
            } catch (const Error& e) {
                std::fprintf(stderr, "fibosc: %s\n", e.what());
                return exit_code(e);
            }
        }
    }

    CLI::App app{"generalized Fibonacci oscillator as an open quantum system"};
    app.require_subcommand(1);
    std::string config_path, r_range_s, q_range_s, beta_range_s;
    app.add_option("--config", config_path, "flat key = value config file");

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--r", cfg.r, "deformation parameter r (> q)");
        sub->add_option("--q", cfg.q, "deformation parameter q");
        sub->add_option("--beta", cfg.beta, "inverse temperature (> 0)");
        sub->add_option("--levels", cfg.levels, "truncation level count");
        sub->add_option("--format", cfg.format, "csv | json (gap)");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--config", config_path, "flat key = value config file");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eps_n, omega_n and stationary weights");
    add_common(spectrum);
    auto* rates = app.add_subcommand("rates", "thermal rates Gamma, lambda, mu per level");
    add_common(rates);
    auto* bohr = app.add_subcommand("bohr", "Bohr classes and genericity witness");
    add_common(bohr);
    bohr->add_option("--tol", cfg.bohr_tol, "gap matching tolerance");
    auto* gap = app.add_subcommand("gap", "spectral gap report");
    add_common(gap);
    auto* simulate = app.add_subcommand("simulate", "integrate the master equation");
    add_common(simulate);
    simulate->add_option("--t-max", cfg.t_max, "integration horizon");
    simulate->add_option("--dt", cfg.dt, "step (default 0.5 * stability bound)");
    simulate->add_option("--init", cfg.init,
                         "ground | level:n | thermal | thermal-perturbed | coherence:j,k");
    auto* sweep = app.add_subcommand("sweep", "gap reports over a parameter grid");
    add_common(sweep);
    sweep->add_option("--r-range", r_range_s, "start:stop:count");
    sweep->add_option("--q-range", q_range_s, "start:stop:count");
    sweep->add_option("--beta-range", beta_range_s, "start:stop:count");
    sweep->add_option("--workers", cfg.workers, "concurrent grid workers");
    auto* figure = app.add_subcommand("figure", "curve data for the paper's figures");
    add_common(figure);
    figure->add_option("--which", cfg.figure, "1 | 2 | 3");
    figure->add_option("--r-range", r_range_s, "start:stop:count override");
    figure->add_option("--beta-range", beta_range_s, "start:stop:count override");

    try {
        app.parse(argc, argv);
        if (!r_range_s.empty())
            cfg.r_range = parse_range(r_range_s);
        if (!q_range_s.empty())
            cfg.q_range = parse_range(q_range_s);
        if (!beta_range_s.empty())
            cfg.beta_range = parse_range(beta_range_s);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            app.exit(e);
            return kExitOk;
        }
        std::fprintf(stderr, "fibosc: %s\n", e.what());
        return kExitValidation;
    } catch (const Error& e) {
        std::fprintf(stderr, "fibosc: %s\n", e.what());
        return exit_code(e);
    }

    if (spectrum->parsed())
        return cmd_spectrum(cfg, std::cout, std::cerr);
    if (rates->parsed())
        return cmd_rates(cfg, std::cout, std::cerr);
    if (bohr->parsed())
        return cmd_bohr(cfg, std::cout, std::cerr);
    if (gap->parsed())
        return cmd_gap(cfg, std::cout, std::cerr);
    if (simulate->parsed())
        return cmd_simulate(cfg, std::cout, std::cerr);
    if (sweep->parsed())
        return cmd_sweep(cfg, std::cout, std::cerr);
    if (figure->parsed())
        return cmd_figure(cfg, std::cout, std::cerr);
    return kExitValidation;
}

} // namespace fibosc::cli
