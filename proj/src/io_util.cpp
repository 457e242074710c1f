#include "scanmix/io_util.hpp"

#include <cstdio>

#include "scanmix/errors.hpp"

namespace scanmix::io {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_config(std::ostream& os, const std::vector<KV>& config) {
  for (const KV& kv : config) os << "# " << kv.key << " = " << kv.value << "\n";
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t t = 0; t < cells.size(); ++t) {
    if (t) os << ',';
    os << cells[t];
  }
  os << "\n";
}

Output::Output(const std::string& path) {
  if (path.empty()) return;
  file_.emplace(path);
  if (!*file_) fail(Errc::IoError, "cannot open " + path + " for writing");
}

}  // namespace scanmix::io
