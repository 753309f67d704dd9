#pragma once

#include <string>

#include "mmr/domination.hpp"
#include "mmr/measure1d.hpp"
#include "mmr/mmspace.hpp"
#include "mmr/obsvar.hpp"

namespace mmr {

// JSON schemas (versioned; unknown keys are rejected with the field named):
//   measure: {"schema":"mmr.measure/1","kind":"gaussian","mean":m,"sd":s}
//            {"kind":"spherical","N":n} | {"kind":"uniform","a":a,"b":b}
//            {"kind":"atoms","points":[[x,mass],...]}
//            {"kind":"grid","nodes":[...],"density":[...],"atoms":[[x,m],...]?}
//   space:   {"schema":"mmr.space/1","n":n,"dist":[[...]],"weight":[...]}

std::string measure_to_json(const Measure1D& m, int indent = 2);
Measure1D measure_from_json(const std::string& text);
Measure1D load_measure(const std::string& path);
void save_measure(const Measure1D& m, const std::string& path);

// Inline measure shorthand for the CLI: "gaussian", "gaussian:m,s",
// "uniform:a,b", "spherical:N", "sigma2" (= spherical:2); anything else is
// treated as a path to a JSON file.
Measure1D parse_measure_arg(const std::string& arg);

std::string space_to_json(const FiniteMMSpace& X, int indent = 2);
FiniteMMSpace space_from_json(const std::string& text);
FiniteMMSpace load_space(const std::string& path);
void save_space(const FiniteMMSpace& X, const std::string& path);

std::string domination_report_to_json(const DominationReport& r, int indent = 2);
std::string obsvar_result_to_json(const ObsVarResult& r, const BoundReport* bound,
                                  const FoliationReport* foliation, int indent = 2);

const char* verdict_name(DominationReport::Verdict v);
const char* foliation_case_name(FoliationReport::Case c);

} // namespace mmr
