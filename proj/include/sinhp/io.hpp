#pragma once

#include <map>
#include <string>
#include <vector>

#include "sinhp/solver.hpp"

namespace sinhp {

// All numeric output goes through %.15g: 15 significant digits, reproducible
// to the last emitted digit for a fixed config and seed.
std::string fmt15(double v);

void write_profile_csv(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& values);

struct Profile {
  std::vector<double> x;
  std::vector<double> u;
};
Profile read_profile_csv(const std::string& path);

// report JSON: lambda, residual_sup, newton_iters, nodal_count, peaks
// [{xi, location, height, mass, sign}], energy, sigma_perp, ... (superset of
// the documented keys)
std::string report_to_json(const SolveReport& rep);
void write_report_json(const std::string& path, const SolveReport& rep);

// the subset of report fields the verify command needs back
struct ReportHeader {
  double lambda = 0.0;
  int k = 0;
  std::vector<int> signs;
  std::vector<double> xis;
  double residual_sup = 0.0;
};
ReportHeader read_report_json(const std::string& path);

void write_summary_csv(const std::string& path, const std::vector<SolveReport>& reports);

// flat "key = value" text; '#' starts a comment
std::map<std::string, std::string> read_key_value(const std::string& path);
void write_key_value(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv);

void write_text(const std::string& path, const std::string& body);

}  // namespace sinhp
