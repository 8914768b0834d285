#include "sinhp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sinhp {

std::string fmt15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
}

void write_profile_csv(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& values) {
  std::ostringstream out;
  out << "x,u\n";
  for (int j = 0; j < mesh.size(); ++j)
    out << fmt15(mesh.nodes[j]) << ',' << fmt15(values[j]) << '\n';
  write_text(path, out.str());
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,u", 0) != 0)
    throw std::runtime_error("profile CSV must start with the header 'x,u': " + path);
  Profile p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed profile row: " + line);
    p.x.push_back(std::stod(line.substr(0, comma)));
    p.u.push_back(std::stod(line.substr(comma + 1)));
  }
  return p;
}

namespace {

std::string json_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt15(v[i]);
  }
  return s + "]";
}

std::string json_num(double v) {
  if (std::isnan(v)) return "null";
  return fmt15(v);
}

}  // namespace

std::string report_to_json(const SolveReport& rep) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"lambda\": " << fmt15(rep.lambda) << ",\n";
  out << "  \"k\": " << rep.config.k() << ",\n";
  out << "  \"signs\": [";
  for (int i = 0; i < rep.config.k(); ++i) out << (i ? "," : "") << rep.config.signs[i];
  out << "],\n";
  out << "  \"residual_sup\": " << fmt15(rep.residual_sup) << ",\n";
  out << "  \"newton_iters\": " << rep.newton_iters << ",\n";
  out << "  \"nodal_count\": " << rep.nodal_count << ",\n";
  out << "  \"nodal_certified\": " << (rep.nodal_certified ? "true" : "false") << ",\n";
  out << "  \"zeros\": " << json_array(rep.zeros) << ",\n";
  out << "  \"peaks\": [";
  for (std::size_t i = 0; i < rep.peaks.size(); ++i) {
    const PeakInfo& p = rep.peaks[i];
    out << (i ? "," : "") << "\n    {\"xi\": " << fmt15(p.xi)
        << ", \"location\": " << fmt15(p.location) << ", \"height\": " << fmt15(p.height)
        << ", \"mass\": " << fmt15(p.mass) << ", \"sign\": " << p.sign << "}";
  }
  out << "\n  ],\n";
  out << "  \"energy\": " << json_num(rep.energy) << ",\n";
  out << "  \"norm_sq\": " << json_num(rep.norm_sq) << ",\n";
  out << "  \"ansatz_energy\": " << json_num(rep.ansatz_energy) << ",\n";
  out << "  \"ansatz_norm_sq\": " << json_num(rep.ansatz_norm_sq) << ",\n";
  out << "  \"remainder_sup\": " << json_num(rep.remainder_sup) << ",\n";
  out << "  \"remainder_l2\": " << json_num(rep.remainder_l2) << ",\n";
  out << "  \"sigma_full\": " << json_num(rep.sigma_full) << ",\n";
  out << "  \"sigma_perp\": " << json_num(rep.sigma_perp) << "\n";
  out << "}\n";
  return out.str();
}

void write_report_json(const std::string& path, const SolveReport& rep) {
  write_text(path, report_to_json(rep));
}

ReportHeader read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  nlohmann::json j;
  in >> j;
  ReportHeader h;
  h.lambda = j.at("lambda").get<double>();
  h.k = j.at("k").get<int>();
  for (const auto& s : j.at("signs")) h.signs.push_back(s.get<int>());
  for (const auto& p : j.at("peaks")) h.xis.push_back(p.at("xi").get<double>());
  h.residual_sup = j.value("residual_sup", 0.0);
  return h;
}

void write_summary_csv(const std::string& path, const std::vector<SolveReport>& reports) {
  std::ostringstream out;
  out << "lambda,residual_sup,newton_iters,nodal_count,nodal_certified,peak_dist_max,"
         "height_gap_max,mass_err_max,norm_sq,norm_sq_gap,energy,energy_gap,sigma_full,sigma_perp\n";
  for (const SolveReport& r : reports) {
    double peak_dist = 0.0, height_gap = 0.0, mass_err = 0.0;
    for (std::size_t i = 0; i < r.peaks.size(); ++i) {
      const PeakInfo& p = r.peaks[i];
      peak_dist = std::max(peak_dist, std::abs(p.location - p.xi));
      height_gap = std::max(
          height_gap,
          std::abs(p.height - predicted_peak_height(r.config, r.lambda, static_cast<int>(i))));
      mass_err = std::max(mass_err, std::abs(p.mass - p.sign * 2.0 * pi));
    }
    double fsum = 0.0;
    for (int i = 0; i < r.config.k(); ++i) fsum += interaction_energy(r.config, i);
    const int k = r.config.k();
    const double norm_pred = -4.0 * pi * k * std::log(r.lambda) - 2.0 * pi * fsum;
    const double energy_pred = -2.0 * pi * k * std::log(r.lambda) - 2.0 * pi * k - pi * fsum;
    out << fmt15(r.lambda) << ',' << fmt15(r.residual_sup) << ',' << r.newton_iters << ','
        << r.nodal_count << ',' << (r.nodal_certified ? 1 : 0) << ',' << fmt15(peak_dist) << ','
        << fmt15(height_gap) << ',' << fmt15(mass_err) << ',' << fmt15(r.ansatz_norm_sq) << ','
        << fmt15(std::abs(r.ansatz_norm_sq - norm_pred)) << ',' << fmt15(r.ansatz_energy) << ','
        << fmt15(std::abs(r.ansatz_energy - energy_pred)) << ',' << fmt15(r.sigma_full) << ','
        << fmt15(r.sigma_perp) << '\n';
  }
  write_text(path, out.str());
}

std::map<std::string, std::string> read_key_value(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

void write_key_value(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  write_text(path, out.str());
}

}  // namespace sinhp
