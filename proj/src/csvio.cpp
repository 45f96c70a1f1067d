#include "pss/csvio.hpp"

#include <fstream>
#include <sstream>

namespace pss {

std::string Provenance::header() const {
  std::ostringstream os;
  os << "# version=" << version_string() << "\n";
  if (!family_config.empty()) {
    os << "# family_hash=" << std::hex << fnv1a(family_config) << std::dec << "\n";
  }
  os << "# seed=" << seed << "\n";
  if (tol > 0.0) os << "# tol=" << tol << "\n";
  for (const auto& e : extra) os << "# " << e << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os.good()) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os.good()) throw IoError("write failure on '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pss
