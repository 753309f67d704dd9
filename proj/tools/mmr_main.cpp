// Command-line front end: parse measure/space descriptions, dispatch the
// library computations, and emit tables, CSV or JSON.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmr/acceptance.hpp"
#include "mmr/domination.hpp"
#include "mmr/errors.hpp"
#include "mmr/json_io.hpp"
#include "mmr/measure1d.hpp"
#include "mmr/mmspace.hpp"
#include "mmr/models.hpp"
#include "mmr/obsvar.hpp"

namespace {

struct RunConfig {
    std::string out_path;
    std::string format; // empty: the command's natural format (csv or json)
    unsigned seed = 0;
    int threads = 1;
};

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw mmr::SchemaError("cannot write file: " + cfg.out_path);
    out << text;
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// render "h1,h2\nrow..." CSV text as an aligned table
std::string csv_to_table(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(csv);
    std::string line;
    std::size_t cols = 0;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        cols = std::max(cols, cells.size());
        rows.push_back(std::move(cells));
    }
    std::vector<std::size_t> width(cols, 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::ostringstream os;
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            os << r[c];
            if (c + 1 < r.size()) os << std::string(width[c] - r[c].size() + 2, ' ');
        }
        os << "\n";
    }
    return os.str();
}

std::string csv_or_table(const RunConfig& cfg, const std::string& csv) {
    return cfg.format == "table" ? csv_to_table(csv) : csv;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw mmr::SchemaError("bad number '" + tok + "' in list");
        }
    }
    if (out.empty()) throw mmr::SchemaError("empty numeric list");
    return out;
}

// "lo:hi:log[:count]" or "lo:hi:lin[:count]" or a comma list
std::vector<double> parse_range(const std::string& s) {
    if (s.find(':') == std::string::npos) return parse_list(s);
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 3 || parts.size() > 4)
        throw mmr::SchemaError("range must be lo:hi:log|lin[:count]");
    double lo, hi;
    int count = 25;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        if (parts.size() == 4) count = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw mmr::SchemaError("bad range bounds in '" + s + "'");
    }
    if (count < 2 || !(hi > lo)) throw mmr::SchemaError("range needs hi > lo and count >= 2");
    std::vector<double> out;
    if (parts[2] == "log") {
        if (!(lo > 0.0)) throw mmr::SchemaError("log range needs lo > 0");
        for (int i = 0; i < count; ++i)
            out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    } else if (parts[2] == "lin") {
        for (int i = 0; i < count; ++i)
            out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    } else {
        throw mmr::SchemaError("range scale must be log or lin");
    }
    return out;
}

std::function<double(double)> phi_by_name(const std::string& name, double& a, double& b) {
    if (name == "sin") {
        a = 0.0;
        b = mmr::kPi;
        return [](double t) { return std::sin(t); };
    }
    if (name == "const") {
        a = 0.0;
        b = 1.0;
        return [](double) { return 1.0; };
    }
    if (name == "gauss") {
        a = -4.0;
        b = 4.0;
        return [](double t) { return std::exp(-0.5 * t * t); };
    }
    throw mmr::SchemaError("unknown phi '" + name + "' (expected sin, const or gauss)");
}

int dispatch(int argc, char** argv) {
    CLI::App app{"metric-measure comparison toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help"); // --h stays free for models zeta
    app.fallthrough(); // global options (--out, --seed, ...) after the subcommand

    RunConfig cfg;
    const char* env_threads = std::getenv("MM_RIGIDITY_THREADS");
    if (env_threads != nullptr) cfg.threads = std::max(1, std::atoi(env_threads));
    app.add_option("--out", cfg.out_path, "output file (default stdout)");
    app.add_option("--format", cfg.format, "json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--seed", cfg.seed, "seed for randomized starts (default 0)");
    app.add_option("--threads", cfg.threads, "worker threads (default 1 or MM_RIGIDITY_THREADS)");

    // ---- profile
    auto* profile = app.add_subcommand("profile", "isoperimetric profile of a measure or space");
    std::string prof_measure, prof_space;
    double prof_eps = 0.0;
    int prof_points = 512;
    bool prof_greedy = false;
    profile->add_option("--measure", prof_measure, "measure (inline name or JSON path)");
    profile->add_option("--space", prof_space, "space JSON path");
    profile->add_option("--eps", prof_eps, "neighborhood scale for finite spaces");
    profile->add_option("--points", prof_points, "sample count for half-line profiles");
    profile->add_flag("--greedy", prof_greedy, "allow the greedy upper bound for n > 20");

    // ---- obsvar
    auto* obsvar = app.add_subcommand("obsvar", "observable lambda-variance of a finite space");
    std::string ov_space, ov_lambda = "t2", ov_nu;
    int ov_restarts = 8;
    bool ov_foliation = false, ov_exact = false;
    double ov_delta = 1.0 / 32.0, ov_ftol = -1.0, ov_btol = 0.05;
    obsvar->add_option("--space", ov_space, "space JSON path")->required();
    obsvar->add_option("--lambda", ov_lambda, "t2 | t | min1 | expsat");
    obsvar->add_option("--nu", ov_nu, "comparison measure: check obsvar <= var_lambda(nu)");
    obsvar->add_option("--restarts", ov_restarts, "multistart count");
    obsvar->add_option("--bound-tol", ov_btol, "tolerance for the --nu comparison");
    obsvar->add_flag("--foliation", ov_foliation, "append the distance-identity report");
    obsvar->add_option("--foliation-tol", ov_ftol, "tolerance for the foliation identities");
    obsvar->add_flag("--exact", ov_exact, "exhaustive grid search (n <= 5)");
    obsvar->add_option("--delta", ov_delta, "grid step for --exact");
    std::string ov_max_csv;
    obsvar->add_option("--maximizer-csv", ov_max_csv, "also write the maximizer as index,value");

    // ---- dominate
    auto* dominate = app.add_subcommand("dominate", "monotone transport between 1D measures");
    std::string dom_source, dom_target, dom_kappas = "0.1,0.2,0.25,0.3,0.4";
    int dom_samples = 2048;
    dominate->add_option("--source", dom_source, "source measure")->required();
    dominate->add_option("--target", dom_target, "target measure")->required();
    dominate->add_option("--kappas", dom_kappas, "kappa grid for the separation checks");
    dominate->add_option("--samples", dom_samples, "quantile samples for the transport map");

    // ---- models
    auto* models = app.add_subcommand("models", "spherical model quantities");
    models->set_help_flag("--help", "print help");
    std::string models_topic, models_N = "2", models_h = "0.5";
    models->add_option("topic", models_topic, "variance | zeta | asympt | table | recurrence")
        ->required();
    models->add_option("--N", models_N, "dimension value, list or range");
    models->add_option("--h", models_h, "Hurwitz zeta offset in (0, 1]");

    // ---- generate
    auto* generate = app.add_subcommand("generate", "write a discretized model space");
    std::string gen_topic, gen_measure = "uniform:0,1", gen_mode = "uniform", gen_F = "circle:8",
                gen_phi = "sin";
    int gen_res = 32, gen_power = 1;
    double gen_N = 2.0;
    generate->add_option("topic", gen_topic, "interval | sphere | warped")->required();
    generate->add_option("--measure", gen_measure, "interval: node measure");
    generate->add_option("--mode", gen_mode, "interval: uniform | quantile")
        ->check(CLI::IsMember({"uniform", "quantile"}));
    generate->add_option("--N", gen_N, "sphere: dimension parameter");
    generate->add_option("--phi", gen_phi, "warped: warping profile (sin, const, gauss)");
    generate->add_option("--n", gen_power, "warped: fiber dimension power");
    generate->add_option("--F", gen_F, "warped: fiber, e.g. circle:8");
    generate->add_option("--res", gen_res, "resolution");

    // ---- verify
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (profile->parsed()) {
        if (!prof_measure.empty()) {
            const mmr::Measure1D nu = mmr::parse_measure_arg(prof_measure);
            const mmr::ProfileCurve pc = mmr::half_line_profile(nu, prof_points);
            std::ostringstream os;
            pc.write_csv(os);
            emit(cfg, csv_or_table(cfg, os.str()));
            return 0;
        }
        if (!prof_space.empty()) {
            if (!(prof_eps > 0.0)) throw mmr::SchemaError("profile --space needs --eps > 0");
            const mmr::FiniteMMSpace X = mmr::load_space(prof_space);
            const mmr::ProfileCurve pc = mmr::profile_bruteforce(X, prof_eps, prof_greedy);
            std::ostringstream os;
            if (pc.upper_bound_only) os << "# greedy upper bound\n";
            pc.write_csv(os);
            emit(cfg, csv_or_table(cfg, os.str()));
            return 0;
        }
        throw mmr::SchemaError("profile needs --measure or --space");
    }

    if (obsvar->parsed()) {
        const mmr::FiniteMMSpace X = mmr::load_space(ov_space);
        const mmr::LambdaFn lambda = mmr::lambda_by_name(ov_lambda);
        const mmr::ObsVarResult res =
            ov_exact ? mmr::obsvar_bruteforce(X, lambda, ov_delta)
                     : mmr::obsvar_maximize(X, lambda, ov_restarts, cfg.seed, cfg.threads);
        mmr::BoundReport bound;
        bool have_bound = false;
        if (!ov_nu.empty()) {
            const mmr::Measure1D nu = mmr::parse_measure_arg(ov_nu);
            bound.tol = ov_btol;
            bound.obsvar = res.value;
            bound.var_nu = mmr::var_lambda(nu, lambda);
            bound.gap = bound.var_nu - bound.obsvar;
            bound.pass = bound.obsvar <= bound.var_nu + ov_btol;
            have_bound = true;
        }
        mmr::FoliationReport fol;
        bool have_fol = false;
        if (ov_foliation) {
            const double tol = ov_ftol > 0.0 ? ov_ftol : 2.0 * X.max_nearest_neighbor_dist();
            fol = mmr::verify_foliation(X, res.maximizer, tol);
            have_fol = true;
        }
        if (!ov_max_csv.empty()) {
            std::ofstream mc(ov_max_csv, std::ios::binary);
            if (!mc) throw mmr::SchemaError("cannot write file: " + ov_max_csv);
            mc << "index,value\n";
            for (std::size_t i = 0; i < res.maximizer.values.size(); ++i)
                mc << i << "," << num(res.maximizer.values[i]) << "\n";
        }
        if (cfg.format == "table") {
            std::ostringstream os;
            os << "obsvar(" << ov_lambda << ") = " << num(res.value) << "  method "
               << (res.method == mmr::ObsVarResult::Method::Bruteforce ? "bruteforce"
                                                                       : "vertex-heuristic")
               << "  lip " << num(res.maximizer.lip) << "\n";
            if (have_bound)
                os << "bound: var_nu " << num(bound.var_nu) << "  gap " << num(bound.gap)
                   << "  " << (bound.pass ? "pass" : "FAIL") << "\n";
            if (have_fol)
                os << "foliation: case " << mmr::foliation_case_name(fol.foliation_case)
                   << "  residuals " << num(fol.max_residual_p) << " / "
                   << num(fol.max_residual_q) << "\n";
            emit(cfg, os.str());
        } else {
            emit(cfg, mmr::obsvar_result_to_json(res, have_bound ? &bound : nullptr,
                                                 have_fol ? &fol : nullptr));
        }
        return 0;
    }

    if (dominate->parsed()) {
        const mmr::Measure1D source = mmr::parse_measure_arg(dom_source);
        const mmr::Measure1D target = mmr::parse_measure_arg(dom_target);
        mmr::TransportOptions opts;
        opts.samples = dom_samples;
        mmr::DominationReport rep = mmr::build_monotone_transport(source, target, opts);
        rep.sep_checks = mmr::sep_necessary_check(source, target, parse_list(dom_kappas));
        if (cfg.format == "table") {
            std::ostringstream os;
            os << "verdict " << mmr::verdict_name(rep.verdict) << "  max slope "
               << num(rep.max_slope) << " (tol " << num(rep.slope_tol) << ")  roundtrip levy "
               << num(rep.roundtrip_levy) << " (tol " << num(rep.levy_tol) << ")\n";
            int sep_failures = 0;
            for (const auto& row : rep.sep_checks)
                if (!row.pass) ++sep_failures;
            os << "separation checks: " << rep.sep_checks.size() - sep_failures << "/"
               << rep.sep_checks.size() << " pass\n";
            if (rep.witness)
                os << "witness: slope " << num(rep.witness->slope) << " on quantile levels ["
                   << num(rep.witness->s0) << ", " << num(rep.witness->s1) << "]\n";
            emit(cfg, os.str());
        } else {
            emit(cfg, mmr::domination_report_to_json(rep));
        }
        return 0;
    }

    if (models->parsed()) {
        std::ostringstream os;
        if (models_topic == "variance") {
            os << "N,closed_form\n";
            for (double N : parse_range(models_N))
                os << num(N) << "," << num(mmr::spherical_variance_closed_form(N)) << "\n";
        } else if (models_topic == "zeta") {
            double h;
            try {
                h = std::stod(models_h);
            } catch (const std::exception&) {
                throw mmr::SchemaError("bad --h value");
            }
            os << "h,zeta2\n" << num(h) << "," << num(mmr::hurwitz_zeta2(h)) << "\n";
        } else if (models_topic == "asympt") {
            os << "N,value,N_times_value,abs_deviation,value_over_sqrtN\n";
            for (const auto& r : mmr::spherical_asymptotic_check(parse_range(models_N)))
                os << num(r.N) << "," << num(r.value) << "," << num(r.n_times_value) << ","
                   << num(r.deviation) << "," << num(r.sqrtn_ratio) << "\n";
        } else if (models_topic == "table") {
            os << "N,closed_form,quadrature,N_times_value\n";
            for (double N : parse_range(models_N)) {
                const double cf = mmr::spherical_variance_closed_form(N);
                const double qm = mmr::centered_second_moment(mmr::Measure1D::spherical(N));
                os << num(N) << "," << num(cf) << "," << num(qm) << "," << num(N * cf) << "\n";
            }
        } else if (models_topic == "recurrence") {
            os << "N,I,K,S,h\n";
            for (double N : parse_range(models_N)) {
                const auto st = mmr::spherical_recurrence_state(N);
                os << num(st.N) << "," << num(st.I) << "," << num(st.K) << "," << num(st.S)
                   << "," << num(st.h) << "\n";
            }
        } else {
            throw mmr::SchemaError("unknown models topic '" + models_topic + "'");
        }
        emit(cfg, csv_or_table(cfg, os.str()));
        return 0;
    }

    if (generate->parsed()) {
        mmr::FiniteMMSpace X({{0.0}}, {1.0});
        if (gen_topic == "interval") {
            const mmr::Measure1D nu = mmr::parse_measure_arg(gen_measure);
            const auto mode = gen_mode == "quantile" ? mmr::IntervalNodeMode::Quantile
                                                     : mmr::IntervalNodeMode::Uniform;
            X = mmr::discretize_interval(nu, gen_res, mode).space;
        } else if (gen_topic == "sphere") {
            X = mmr::discretize_sphere_angle(gen_N, gen_res).space;
        } else if (gen_topic == "warped") {
            if (gen_F.rfind("circle:", 0) != 0)
                throw mmr::SchemaError("warped fiber must be circle:<k>");
            int k = 0;
            try {
                k = std::stoi(gen_F.substr(7));
            } catch (const std::exception&) {
                throw mmr::SchemaError("bad fiber size in '" + gen_F + "'");
            }
            double a = 0.0, b = 1.0;
            const auto phi = phi_by_name(gen_phi, a, b);
            X = mmr::discretize_warped(phi, a, b, gen_power, mmr::make_circle(k), gen_res)
                    .space;
        } else {
            throw mmr::SchemaError("unknown generate topic '" + gen_topic + "'");
        }
        emit(cfg, mmr::space_to_json(X));
        return 0;
    }

    if (verify->parsed()) {
        const int failures = mmr::run_acceptance(std::cout, cfg.threads);
        return failures == 0 ? 0 : 1;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const mmr::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mmr::SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
