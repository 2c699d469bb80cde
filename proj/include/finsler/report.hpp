#ifndef FINSLER_REPORT_HPP
#define FINSLER_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace finsler {

/// Structured pass/fail record for one verified identity.
struct CheckReport {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  double residual = 0.0;  // computed - reference, or the documented one-sided slack
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();

  bool operator==(const CheckReport& o) const = default;
};

void to_json(nlohmann::json& j, const CheckReport& r);
void from_json(const nlohmann::json& j, CheckReport& r);

/// Two-sided check: pass iff |computed - reference| <= tolerance.
CheckReport make_check(const std::string& name, double computed, double reference,
                       double tolerance);

/// Writes rows as CSV with a header line. Values are printed with %.17g so
/// repeated runs produce byte-identical files.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace finsler

#endif
