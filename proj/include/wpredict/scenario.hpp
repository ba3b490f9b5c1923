#pragma once

#include <string>

#include "wpredict/risksim.hpp"

namespace wpredict {

// Parses a scenario JSON document. Schema: family, d, n, sigma, mu_norm_grid,
// estimators [{kind, params{shift}}], replicates, seed, crn (optional, default
// true). Unknown keys are rejected. Throws ValidationError.
Scenario parse_scenario_json(const std::string& text);

Scenario load_scenario_file(const std::string& path);

// Canonical JSON echo; parsing it back yields an identical run.
std::string scenario_to_json(const Scenario& sc);

// Locale-independent decimal with 10 significant digits.
std::string format_number(double v);

// CSV with header mu_norm,estimator,risk_hat,std_err,n_reps and LF endings.
std::string risk_curve_csv(const RiskCurve& curve);

// 800x600 line chart, one polyline per estimator, text legend.
std::string risk_curve_svg(const RiskCurve& curve);

}  // namespace wpredict
