#include "dphase/report.hpp"

#include <cstdio>
#include <ostream>

namespace dphase {

void Report::set(const std::string& key, double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  lines_.emplace_back(key, buf);
}

void Report::set(const std::string& key, long value) {
  lines_.emplace_back(key, std::to_string(value));
}

void Report::set(const std::string& key, bool value) {
  lines_.emplace_back(key, value ? "true" : "false");
}

void Report::set(const std::string& key, const std::string& value) {
  lines_.emplace_back(key, value);
}

std::string Report::to_text() const {
  std::string out;
  for (const auto& [k, v] : lines_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void Report::write(std::ostream& os) const { os << to_text(); }

}  // namespace dphase
