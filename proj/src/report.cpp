#include "finsler/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace finsler {

void to_json(nlohmann::json& j, const CheckReport& r) {
  j = nlohmann::json{{"name", r.name},         {"computed", r.computed},
                     {"reference", r.reference}, {"tolerance", r.tolerance},
                     {"residual", r.residual},   {"pass", r.pass},
                     {"details", r.details}};
}

void from_json(const nlohmann::json& j, CheckReport& r) {
  j.at("name").get_to(r.name);
  j.at("computed").get_to(r.computed);
  j.at("reference").get_to(r.reference);
  j.at("tolerance").get_to(r.tolerance);
  j.at("residual").get_to(r.residual);
  j.at("pass").get_to(r.pass);
  r.details = j.value("details", nlohmann::json::object());
}

CheckReport make_check(const std::string& name, double computed, double reference,
                       double tolerance) {
  CheckReport r;
  r.name = name;
  r.computed = computed;
  r.reference = reference;
  r.tolerance = tolerance;
  r.residual = computed - reference;
  r.pass = std::abs(r.residual) <= tolerance;
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline surprises
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace finsler
