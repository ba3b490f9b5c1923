#include "wpredict/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpredict/errors.hpp"
#include "wpredict/predictive.hpp"

namespace wpredict {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ValidationError(std::string("unknown key \"") + it.key() + "\" in " + where);
    }
  }
}

const json& require_key(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string("missing key \"") + key + "\" in " + where);
  }
  return *it;
}

std::int64_t as_integer(const json& v, const char* key) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ValidationError(std::string("\"") + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

double as_finite_number(const json& v, const char* key) {
  if (!v.is_number()) {
    throw ValidationError(std::string("\"") + key + "\" must be a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ValidationError(std::string("\"") + key + "\" must be finite");
  }
  return x;
}

EstimatorSpec parse_estimator(const json& e, std::size_t index) {
  char where[64];
  std::snprintf(where, sizeof(where), "estimators[%zu]", index);
  if (!e.is_object()) {
    throw ValidationError(std::string(where) + " must be an object");
  }
  reject_unknown_keys(e, {"kind", "params"}, where);
  const json& kind = require_key(e, "kind", where);
  if (!kind.is_string()) {
    throw ValidationError(std::string(where) + ".kind must be a string");
  }
  EstimatorSpec spec;
  spec.kind = kind_from_name(kind.get<std::string>());
  if (e.contains("params")) {
    const json& params = e["params"];
    if (!params.is_object()) {
      throw ValidationError(std::string(where) + ".params must be an object");
    }
    reject_unknown_keys(params, {"shift"}, where);
    if (params.contains("shift")) {
      const json& shift = params["shift"];
      if (!shift.is_array()) {
        throw ValidationError(std::string(where) + ".params.shift must be an array");
      }
      for (const json& v : shift) {
        spec.shift.push_back(as_finite_number(v, "shift"));
      }
    }
  }
  return spec;
}

}  // namespace

Scenario parse_scenario_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("scenario document must be a JSON object");
  }
  reject_unknown_keys(doc,
                      {"family", "d", "n", "sigma", "mu_norm_grid", "estimators",
                       "replicates", "seed", "crn"},
                      "scenario");

  Scenario sc;
  const json& family = require_key(doc, "family", "scenario");
  if (!family.is_string()) {
    throw ValidationError("\"family\" must be a string");
  }
  sc.model.family = family_from_name(family.get<std::string>());

  const std::int64_t d = as_integer(require_key(doc, "d", "scenario"), "d");
  const std::int64_t n = as_integer(require_key(doc, "n", "scenario"), "n");
  if (d < 1) throw ValidationError("\"d\" must be at least 1");
  if (n < 1) throw ValidationError("\"n\" must be at least 1");
  sc.model.d = static_cast<std::size_t>(d);
  sc.model.n = static_cast<std::size_t>(n);

  sc.sigma_truth = as_finite_number(require_key(doc, "sigma", "scenario"), "sigma");
  sc.model.sigma_known = sc.sigma_truth;

  const json& grid = require_key(doc, "mu_norm_grid", "scenario");
  if (!grid.is_array() || grid.empty()) {
    throw ValidationError("\"mu_norm_grid\" must be a non-empty array");
  }
  for (const json& v : grid) {
    sc.mu_norm_grid.push_back(as_finite_number(v, "mu_norm_grid"));
  }

  const json& ests = require_key(doc, "estimators", "scenario");
  if (!ests.is_array() || ests.empty()) {
    throw ValidationError("\"estimators\" must be a non-empty array");
  }
  for (std::size_t i = 0; i < ests.size(); ++i) {
    sc.estimators.push_back(parse_estimator(ests[i], i));
  }

  const std::int64_t reps = as_integer(require_key(doc, "replicates", "scenario"), "replicates");
  if (reps < 0) throw ValidationError("\"replicates\" must be nonnegative");
  sc.replicates = static_cast<std::size_t>(reps);

  const json& seed = require_key(doc, "seed", "scenario");
  if (seed.is_number_unsigned()) {
    sc.seed = seed.get<std::uint64_t>();
  } else if (seed.is_number_integer()) {
    const std::int64_t raw = seed.get<std::int64_t>();
    if (raw < 0) throw ValidationError("\"seed\" must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(raw);
  } else {
    throw ValidationError("\"seed\" must be an integer");
  }

  if (doc.contains("crn")) {
    const json& crn = doc["crn"];
    if (!crn.is_boolean()) throw ValidationError("\"crn\" must be a boolean");
    sc.crn = crn.get<bool>();
  }

  sc.mu_direction.assign(sc.model.d, 0.0);
  sc.mu_direction[0] = 1.0;
  validate_scenario(sc);
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
  json doc;
  doc["family"] = family_name(sc.model.family);
  doc["d"] = sc.model.d;
  doc["n"] = sc.model.n;
  doc["sigma"] = sc.sigma_truth;
  doc["mu_norm_grid"] = sc.mu_norm_grid;
  json ests = json::array();
  for (const EstimatorSpec& e : sc.estimators) {
    json entry;
    entry["kind"] = kind_name(e.kind);
    if (!e.shift.empty()) {
      entry["params"] = json{{"shift", e.shift}};
    }
    ests.push_back(std::move(entry));
  }
  doc["estimators"] = std::move(ests);
  doc["replicates"] = sc.replicates;
  doc["seed"] = sc.seed;
  doc["crn"] = sc.crn;
  return doc.dump(2);
}

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return std::string(buf);
}

std::string risk_curve_csv(const RiskCurve& curve) {
  std::string out = "mu_norm,estimator,risk_hat,std_err,n_reps\n";
  for (std::size_t g = 0; g < curve.mu_norm_grid.size(); ++g) {
    for (std::size_t e = 0; e < curve.estimator_ids.size(); ++e) {
      const RiskCell& cell = curve.cells[g][e];
      out += format_number(curve.mu_norm_grid[g]);
      out += ',';
      out += curve.estimator_ids[e];
      out += ',';
      out += format_number(cell.risk_hat);
      out += ',';
      out += format_number(cell.std_err);
      out += ',';
      char reps[32];
      std::snprintf(reps, sizeof(reps), "%zu", cell.n_reps);
      out += reps;
      out += '\n';
    }
  }
  return out;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return std::string(buf);
}

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#3a7d44",
                          "#8e5ba6", "#c77d2e", "#4a4a4a"};

}  // namespace

std::string risk_curve_svg(const RiskCurve& curve) {
  const double width = 800.0;
  const double height = 600.0;
  const double left = 70.0;
  const double right = width - 170.0;
  const double top = 30.0;
  const double bottom = height - 50.0;

  double xmin = curve.mu_norm_grid.front();
  double xmax = curve.mu_norm_grid.back();
  if (xmax <= xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  double ymin = curve.cells[0][0].risk_hat;
  double ymax = ymin;
  for (const auto& row : curve.cells) {
    for (const RiskCell& cell : row) {
      ymin = std::min(ymin, cell.risk_hat);
      ymax = std::max(ymax, cell.risk_hat);
    }
  }
  double pad = 0.05 * (ymax - ymin);
  if (pad <= 0.0) pad = std::max(0.05 * std::fabs(ymax), 0.5);
  ymin -= pad;
  ymax += pad;

  const auto sx = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (right - left);
  };
  const auto sy = [&](double y) {
    return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";

  svg += "<line x1=\"" + svg_coord(left) + "\" y1=\"" + svg_coord(bottom) +
         "\" x2=\"" + svg_coord(right) + "\" y2=\"" + svg_coord(bottom) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + svg_coord(left) + "\" y1=\"" + svg_coord(top) +
         "\" x2=\"" + svg_coord(left) + "\" y2=\"" + svg_coord(bottom) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.4g", fx);
    svg += "<text x=\"" + svg_coord(sx(fx)) + "\" y=\"" + svg_coord(bottom + 18.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           xml_escape(label) + "</text>\n";
    std::snprintf(label, sizeof(label), "%.4g", fy);
    svg += "<text x=\"" + svg_coord(left - 6.0) + "\" y=\"" + svg_coord(sy(fy) + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
           xml_escape(label) + "</text>\n";
  }
  svg += "<text x=\"" + svg_coord((left + right) / 2.0) + "\" y=\"" +
         svg_coord(height - 12.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
         "mu_norm</text>\n";
  svg += "<text x=\"18\" y=\"" + svg_coord((top + bottom) / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " + svg_coord((top + bottom) / 2.0) + ")\">"
         "risk_hat</text>\n";

  const std::size_t n_palette = sizeof(kPalette) / sizeof(kPalette[0]);
  for (std::size_t e = 0; e < curve.estimator_ids.size(); ++e) {
    const char* color = kPalette[e % n_palette];
    std::string points;
    for (std::size_t g = 0; g < curve.mu_norm_grid.size(); ++g) {
      if (!points.empty()) points += ' ';
      points += svg_coord(sx(curve.mu_norm_grid[g]));
      points += ',';
      points += svg_coord(sy(curve.cells[g][e].risk_hat));
    }
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
  }

  for (std::size_t e = 0; e < curve.estimator_ids.size(); ++e) {
    const char* color = kPalette[e % n_palette];
    const double ly = top + 14.0 + 18.0 * static_cast<double>(e);
    svg += "<line x1=\"" + svg_coord(right + 10.0) + "\" y1=\"" + svg_coord(ly - 4.0) +
           "\" x2=\"" + svg_coord(right + 34.0) + "\" y2=\"" + svg_coord(ly - 4.0) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + svg_coord(right + 40.0) + "\" y=\"" + svg_coord(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(curve.estimator_ids[e]) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace wpredict
