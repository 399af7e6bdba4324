#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "coh/surface.hpp"

namespace coh::test {

inline std::string data_file(const std::string& name) {
  std::ifstream in(std::string(COH_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(COH_TEST_DATA) + "/" + name; }

inline Term src_s(const std::string& s) { return parse_term(s, Fragment::SourceStlc); }
inline Term src_e(const std::string& s) { return parse_term(s, Fragment::SourceEff); }
inline Term tgt(const std::string& s) { return parse_term(s, Fragment::Target); }
inline Type ty_s(const std::string& s) { return parse_type(s, TypeSyntax::SourceStlc); }
inline Type ty_e(const std::string& s) { return parse_type(s, TypeSyntax::SourceEff); }
inline Type ty_t(const std::string& s) { return parse_type(s, TypeSyntax::Target); }

}  // namespace coh::test
