#pragma once
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "polsim/errors.hpp"

namespace polsim {

/// Formats a double with fixed significant digits via snprintf, so repeated
/// runs emit byte-identical files.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw SimError("cannot open output file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_num(values[i]);
    }
    out_ << '\n';
  }

  void row_raw(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

}  // namespace polsim
