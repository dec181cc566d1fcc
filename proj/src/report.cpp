#include "emhd/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emhd {

#ifndef EMHD_VERSION
#define EMHD_VERSION "0.0.0"
#endif

std::string version_string() { return EMHD_VERSION; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

nlohmann::ordered_json provenance(const std::string& command, const std::string& hash) {
  nlohmann::ordered_json p;
  p["command"] = command;
  p["config_hash"] = hash;
  p["version"] = version_string();
  return p;
}

std::string csv_provenance(const std::string& command, const std::string& hash) {
  std::ostringstream os;
  os << "# command=" << command << "\n# config_hash=" << hash << "\n# version=" << version_string() << '\n';
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace emhd
