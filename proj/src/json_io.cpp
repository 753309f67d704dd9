#include "mmr/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmr/errors.hpp"

namespace mmr {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON");
    return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw SchemaError(std::string(what) + ": unknown field '" + it.key() + "'");
    }
}

double need_number(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError(std::string(what) + ": missing numeric field '" + key + "'");
    return j[key].get<double>();
}

std::vector<double> need_array(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_array())
        throw SchemaError(std::string(what) + ": missing array field '" + key + "'");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw SchemaError(std::string(what) + ": field '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<Measure1D::Atom> read_atoms(const json& j, const char* key, const char* what) {
    std::vector<Measure1D::Atom> atoms;
    if (!j.contains(key)) return atoms;
    if (!j[key].is_array())
        throw SchemaError(std::string(what) + ": field '" + key + "' must be an array");
    for (const auto& p : j[key]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw SchemaError(std::string(what) + ": field '" + key +
                              "' must hold [location, mass] pairs");
        atoms.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return atoms;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write file: " + path);
    out << text;
}

} // namespace

std::string measure_to_json(const Measure1D& m, int indent) {
    json j;
    j["schema"] = "mmr.measure/1";
    j["kind"] = m.kind_name();
    switch (m.kind()) {
        case Measure1D::Kind::Gaussian:
            j["mean"] = m.gaussian_mean();
            j["sd"] = m.gaussian_sd();
            break;
        case Measure1D::Kind::Spherical: j["N"] = m.spherical_dim(); break;
        case Measure1D::Kind::Uniform:
            j["a"] = m.uniform_a();
            j["b"] = m.uniform_b();
            break;
        case Measure1D::Kind::Atoms: {
            json pts = json::array();
            for (const auto& a : m.atom_list()) pts.push_back({a.x, a.mass});
            j["points"] = pts;
            break;
        }
        case Measure1D::Kind::Grid: {
            j["nodes"] = m.grid_nodes();
            j["density"] = m.grid_density();
            if (!m.atom_list().empty()) {
                json pts = json::array();
                for (const auto& a : m.atom_list()) pts.push_back({a.x, a.mass});
                j["atoms"] = pts;
            }
            break;
        }
    }
    return j.dump(indent) + "\n";
}

Measure1D measure_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw SchemaError("measure: expected a JSON object");
    if (j.contains("schema") && j["schema"] != "mmr.measure/1")
        throw SchemaError("measure: unsupported schema");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw SchemaError("measure: missing string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "gaussian") {
            reject_unknown(j, {"schema", "kind", "mean", "sd"}, "measure");
            return Measure1D::gaussian(need_number(j, "mean", "measure"),
                                       need_number(j, "sd", "measure"));
        }
        if (kind == "spherical") {
            reject_unknown(j, {"schema", "kind", "N"}, "measure");
            return Measure1D::spherical(need_number(j, "N", "measure"));
        }
        if (kind == "uniform") {
            reject_unknown(j, {"schema", "kind", "a", "b"}, "measure");
            return Measure1D::uniform(need_number(j, "a", "measure"),
                                      need_number(j, "b", "measure"));
        }
        if (kind == "atoms") {
            reject_unknown(j, {"schema", "kind", "points"}, "measure");
            return Measure1D::atoms(read_atoms(j, "points", "measure"));
        }
        if (kind == "grid") {
            reject_unknown(j, {"schema", "kind", "nodes", "density", "atoms"}, "measure");
            return Measure1D::grid(need_array(j, "nodes", "measure"),
                                   need_array(j, "density", "measure"),
                                   read_atoms(j, "atoms", "measure"));
        }
    } catch (const ContractError& e) {
        throw SchemaError(std::string("measure: ") + e.what());
    }
    throw SchemaError("measure: unknown kind '" + kind + "'");
}

Measure1D load_measure(const std::string& path) { return measure_from_json(read_file(path)); }

void save_measure(const Measure1D& m, const std::string& path) {
    write_file(path, measure_to_json(m));
}

Measure1D parse_measure_arg(const std::string& arg) {
    auto split_params = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    };
    try {
        if (arg == "gaussian") return Measure1D::gaussian(0.0, 1.0);
        if (arg.rfind("gaussian:", 0) == 0) {
            const auto p = split_params(arg.substr(9));
            if (p.size() != 2) throw SchemaError("gaussian:<mean>,<sd>");
            return Measure1D::gaussian(p[0], p[1]);
        }
        if (arg.rfind("uniform:", 0) == 0) {
            const auto p = split_params(arg.substr(8));
            if (p.size() != 2) throw SchemaError("uniform:<a>,<b>");
            return Measure1D::uniform(p[0], p[1]);
        }
        if (arg.rfind("spherical:", 0) == 0) {
            const auto p = split_params(arg.substr(10));
            if (p.size() != 1) throw SchemaError("spherical:<N>");
            return Measure1D::spherical(p[0]);
        }
        if (arg.rfind("sigma", 0) == 0 && arg.size() > 5)
            return Measure1D::spherical(std::stod(arg.substr(5)));
    } catch (const ContractError& e) {
        throw SchemaError(std::string("measure argument: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw SchemaError("measure argument: bad numeric parameter in '" + arg + "'");
    }
    return load_measure(arg);
}

std::string space_to_json(const FiniteMMSpace& X, int indent) {
    json j;
    j["schema"] = "mmr.space/1";
    j["n"] = X.size();
    json dist = json::array();
    for (int i = 0; i < X.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < X.size(); ++k) row.push_back(X.dist(i, k));
        dist.push_back(row);
    }
    j["dist"] = dist;
    j["weight"] = X.weights();
    return j.dump(indent) + "\n";
}

FiniteMMSpace space_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw SchemaError("space: expected a JSON object");
    if (j.contains("schema") && j["schema"] != "mmr.space/1")
        throw SchemaError("space: unsupported schema");
    reject_unknown(j, {"schema", "n", "dist", "weight"}, "space");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw SchemaError("space: missing integer field 'n'");
    const int n = j["n"].get<int>();
    if (!j.contains("dist") || !j["dist"].is_array() ||
        j["dist"].size() != static_cast<std::size_t>(n))
        throw SchemaError("space: field 'dist' must be an n x n matrix");
    std::vector<std::vector<double>> dist;
    for (const auto& row : j["dist"]) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            throw SchemaError("space: field 'dist' must be an n x n matrix");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw SchemaError("space: field 'dist' must hold numbers");
            r.push_back(v.get<double>());
        }
        dist.push_back(std::move(r));
    }
    const std::vector<double> weight = need_array(j, "weight", "space");
    if (weight.size() != static_cast<std::size_t>(n))
        throw SchemaError("space: field 'weight' must have n entries");
    try {
        return FiniteMMSpace(std::move(dist), weight);
    } catch (const ContractError& e) {
        throw SchemaError(std::string("space: ") + e.what());
    }
}

FiniteMMSpace load_space(const std::string& path) { return space_from_json(read_file(path)); }

void save_space(const FiniteMMSpace& X, const std::string& path) {
    write_file(path, space_to_json(X));
}

const char* verdict_name(DominationReport::Verdict v) {
    switch (v) {
        case DominationReport::Verdict::DominatesMonotone: return "dominates-monotone";
        case DominationReport::Verdict::Fails: return "fails";
        case DominationReport::Verdict::Undecided: return "undecided";
    }
    return "?";
}

const char* foliation_case_name(FoliationReport::Case c) {
    switch (c) {
        case FoliationReport::Case::Bounded: return "bounded";
        case FoliationReport::Case::Ray: return "ray";
        case FoliationReport::Case::None: return "none";
    }
    return "?";
}

std::string domination_report_to_json(const DominationReport& r, int indent) {
    json j;
    j["schema"] = "mmr.domination-report/1";
    j["verdict"] = verdict_name(r.verdict);
    j["max_slope"] = r.max_slope;
    j["slope_tol"] = r.slope_tol;
    j["roundtrip_levy"] = r.roundtrip_levy;
    j["levy_tol"] = r.levy_tol;
    if (r.map) {
        json m;
        m["breakpoints"] = r.map->xs;
        m["values"] = r.map->ys;
        m["extension"] =
            r.map->extension == PiecewiseLinear::Extension::Affine ? "affine" : "constant";
        j["map"] = m;
    }
    if (r.witness) {
        json w;
        w["s0"] = r.witness->s0;
        w["s1"] = r.witness->s1;
        w["x0"] = r.witness->x0;
        w["x1"] = r.witness->x1;
        w["slope"] = r.witness->slope;
        j["witness"] = w;
    }
    if (!r.sep_checks.empty()) {
        json rows = json::array();
        for (const auto& s : r.sep_checks) {
            json row;
            row["k0"] = s.k0;
            row["k1"] = s.k1;
            row["sep_target"] = s.sep_target;
            row["sep_source"] = s.sep_source;
            row["pass"] = s.pass;
            rows.push_back(row);
        }
        j["sep_checks"] = rows;
    }
    return j.dump(indent) + "\n";
}

std::string obsvar_result_to_json(const ObsVarResult& r, const BoundReport* bound,
                                  const FoliationReport* foliation, int indent) {
    json j;
    j["schema"] = "mmr.obsvar-report/1";
    j["value"] = r.value;
    j["method"] =
        r.method == ObsVarResult::Method::Bruteforce ? "bruteforce" : "vertex-heuristic";
    j["restarts"] = r.restarts;
    j["lip"] = r.maximizer.lip;
    j["maximizer"] = r.maximizer.values;
    if (r.certificate) j["certificate"] = *r.certificate;
    if (bound) {
        json b;
        b["obsvar"] = bound->obsvar;
        b["var_nu"] = bound->var_nu;
        b["gap"] = bound->gap;
        b["pass"] = bound->pass;
        b["tol"] = bound->tol;
        j["bound"] = b;
    }
    if (foliation) {
        json f;
        f["case"] = foliation_case_name(foliation->foliation_case);
        f["p"] = foliation->p;
        f["q"] = foliation->q;
        f["unique_p"] = foliation->unique_p;
        f["unique_q"] = foliation->unique_q;
        f["max_residual_p"] = foliation->max_residual_p;
        f["max_residual_q"] = foliation->max_residual_q;
        f["max_alignment_defect"] = foliation->max_alignment_defect;
        f["residual_p"] = foliation->residual_p;
        f["residual_q"] = foliation->residual_q;
        f["tol"] = foliation->tol;
        j["foliation"] = f;
    }
    return j.dump(indent) + "\n";
}

} // namespace mmr
