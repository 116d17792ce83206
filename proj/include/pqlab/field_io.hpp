#pragma once

#include <iosfwd>
#include <string>

#include "pqlab/grid.hpp"

namespace pqlab {

struct FieldFile {
  DiscreteField field;
  std::string family;
};

void write_field(std::ostream& os, const DiscreteField& u, const std::string& family);
FieldFile read_field(std::istream& is);

void save_field(const std::string& path, const DiscreteField& u, const std::string& family);
FieldFile load_field(const std::string& path);

}  // namespace pqlab
