#ifndef CRJET_TEST_FIXTURES_HPP
#define CRJET_TEST_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "crjet/parser.hpp"

inline std::string fixture_text(const std::string& name) {
  std::ifstream in(std::string(CRJET_FIXTURES) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline crjet::ManifoldSpec load_manifold(const std::string& name) { return crjet::parse_manifold(fixture_text(name)); }
inline crjet::MapSource load_map(const std::string& name) { return crjet::parse_map(fixture_text(name)); }

#endif  // CRJET_TEST_FIXTURES_HPP
