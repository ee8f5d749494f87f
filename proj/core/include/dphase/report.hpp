#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dphase {

// Flat `path.to.key = value` report: UTF-8, one key per line in insertion
// order, floats at 17 significant digits for bit-exact diffing.
class Report {
public:
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void set(const std::string& key, int value) { set(key, static_cast<long>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  std::string to_text() const;
  void write(std::ostream& os) const;

private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace dphase
