#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstddef>
#include <string>
#include <vector>

#include "wpredict/estimators.hpp"
#include "wpredict/linalg.hpp"
#include "wpredict/risksim.hpp"
#include "wpredict/scenario.hpp"
#include "wpredict/wasserstein.hpp"

namespace py = pybind11;

namespace {

using wpredict::Matrix;
using wpredict::SpdMatrix;
using wpredict::Vector;

SpdMatrix spd_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw wpredict::DomainError("covariance rows must form a square matrix");
    }
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return SpdMatrix::from_matrix(m);
}

wpredict::EmpiricalCloud cloud_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw wpredict::DomainError("point cloud must be non-empty");
  const std::size_t d = rows[0].size();
  Matrix pts(rows.size(), d, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw wpredict::DomainError("all points must have the same dimension");
    }
    for (std::size_t j = 0; j < d; ++j) {
      pts(i, j) = rows[i][j];
    }
  }
  return wpredict::EmpiricalCloud{std::move(pts)};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "predictive density estimation under Wasserstein-2 loss";
  mod.attr("__version__") = "0.1.0";

  mod.def(
      "w2_gaussian",
      [](const Vector& mean1, const std::vector<std::vector<double>>& cov1,
         const Vector& mean2, const std::vector<std::vector<double>>& cov2) {
        return wpredict::w2_gaussian({mean1, spd_from_rows(cov1)},
                                     {mean2, spd_from_rows(cov2)});
      },
      py::arg("mean1"), py::arg("cov1"), py::arg("mean2"), py::arg("cov2"),
      "Closed-form Wasserstein-2 distance between two Gaussians.");

  mod.def(
      "gelbrich_bound",
      [](const Vector& mean1, const std::vector<std::vector<double>>& cov1,
         const Vector& mean2, const std::vector<std::vector<double>>& cov2) {
        return wpredict::gelbrich_bound({mean1, spd_from_rows(cov1)},
                                        {mean2, spd_from_rows(cov2)});
      },
      py::arg("mean1"), py::arg("cov1"), py::arg("mean2"), py::arg("cov2"),
      "Moment-based lower bound on Wasserstein-2 between two point clouds.");

  mod.def(
      "empirical_w2",
      [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
        return wpredict::empirical_w2_assignment(cloud_from_rows(a), cloud_from_rows(b))
            .distance;
      },
      py::arg("a"), py::arg("b"),
      "Exact empirical Wasserstein-2 distance between equal-size point clouds.");

  mod.def("empirical_w2_1d", &wpredict::empirical_w2_1d, py::arg("a"), py::arg("b"),
          "Exact empirical Wasserstein-2 distance between equal-size samples on the line.");

  mod.def(
      "james_stein",
      [](const Vector& x, double sigma, bool positive_part) {
        return wpredict::james_stein(wpredict::KnownScaleObs{x, sigma}, positive_part);
      },
      py::arg("x"), py::arg("sigma") = 1.0, py::arg("positive_part") = false,
      "James-Stein shrinkage of a single observation with known scale.");

  mod.def(
      "hier_estimate",
      [](const Vector& xbar, double s, std::size_t n) {
        const wpredict::HierEstimate h =
            wpredict::hier_estimate(wpredict::SufficientStats{xbar, s, n});
        py::dict out;
        out["mu_hat"] = h.mu_hat;
        out["sigma_hat"] = h.sigma_hat;
        out["lambda_mean"] = h.lambda_mean;
        out["w"] = h.w;
        return out;
      },
      py::arg("xbar"), py::arg("s"), py::arg("n"),
      "Hierarchical-prior location and scale estimate from sufficient statistics.");

  mod.def("phi0", &wpredict::phi0, py::arg("w"), py::arg("d"), py::arg("m"),
          "Hierarchical-prior scale multiplier phi0(w).");

  mod.def("equivariant_c", &wpredict::equivariant_c, py::arg("m"),
          "Best equivariant scale multiplier c(m).");

  mod.def("posterior_lambda_mean", &wpredict::hier_posterior_lambda_mean, py::arg("w"),
          py::arg("d"), py::arg("m"), "Posterior mean of the shrinkage weight.");

  mod.def(
      "stein_variance",
      [](const Vector& xbar, double s, std::size_t n) {
        return wpredict::stein_variance(wpredict::SufficientStats{xbar, s, n});
      },
      py::arg("xbar"), py::arg("s"), py::arg("n"),
      "Stein-type variance estimate improving on the equivariant one.");

  mod.def(
      "risk_curve",
      [](const std::string& scenario_json) {
        const wpredict::Scenario sc = wpredict::parse_scenario_json(scenario_json);
        const wpredict::RiskCurve curve = wpredict::simulate_risk(sc, {});
        py::list rows;
        for (std::size_t g = 0; g < curve.mu_norm_grid.size(); ++g) {
          for (std::size_t e = 0; e < curve.estimator_ids.size(); ++e) {
            py::dict row;
            row["mu_norm"] = curve.mu_norm_grid[g];
            row["estimator"] = curve.estimator_ids[e];
            row["risk_hat"] = curve.cells[g][e].risk_hat;
            row["std_err"] = curve.cells[g][e].std_err;
            row["n_reps"] = curve.cells[g][e].n_reps;
            rows.append(std::move(row));
          }
        }
        return rows;
      },
      py::arg("scenario_json"),
      "Simulate risk curves for a scenario given as a JSON string.");
}
