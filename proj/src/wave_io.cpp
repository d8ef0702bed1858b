#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "kc/errors.hpp"
#include "kc/wave_operators.hpp"

namespace kc::wave {

void write_profile_csv(const Profile& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write profile file " + path);
  f << "coordinate,value\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) f << p.x(i) << ',' << p.values(i) << '\n';
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read profile file " + path);
  std::string line;
  std::getline(f, line);
  if (line.rfind("coordinate,value", 0) != 0) throw ConfigError(path + ": expected header 'coordinate,value'");
  std::vector<double> xs, vs;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double a, b;
    char comma;
    if (!(ss >> a >> comma >> b) || comma != ',')
      throw ConfigError(path + ": malformed row at line " + std::to_string(lineno));
    xs.push_back(a);
    vs.push_back(b);
  }
  Profile p;
  p.x = Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  p.values = Eigen::Map<Vec>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  return p;
}

}  // namespace kc::wave
