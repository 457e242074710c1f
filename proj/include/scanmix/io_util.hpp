#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace scanmix::io {

// Shortest text that round-trips a double exactly.
std::string fmt_double(double v);

struct KV {
  std::string key, value;
};

// "# key = value" comment block echoing the run configuration, so every
// output file carries what produced it.
void csv_config(std::ostream& os, const std::vector<KV>& config);
void csv_row(std::ostream& os, const std::vector<std::string>& cells);

// Writes to the given path, or to stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path);
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::optional<std::ofstream> file_;
};

}  // namespace scanmix::io
