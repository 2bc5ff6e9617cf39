#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "floodguard/model.hpp"

namespace floodguard {

// Fixed-format MPS. Columns are named C1..Cn and rows R1..Rm in catalog and
// constraint order; the objective row is COST. Numbers use at most 12
// characters, two row entries per data line. Binaries are written as BV
// bounds.
void export_mps(const MilpInstance& instance, std::ostream& out, const std::string& name = "FLOODGUARD");
std::string export_mps(const MilpInstance& instance, const std::string& name = "FLOODGUARD");
void write_mps(const MilpInstance& instance, const std::filesystem::path& path);

struct MpsModel {
  std::string name;
  MilpInstance instance;  // catalog names are the MPS column names
  std::vector<std::string> row_names;
};

// Reads fixed or free MPS (tokens separated by blanks). Supports ROWS,
// COLUMNS (with INTORG/INTEND markers), RHS, BOUNDS (UP, LO, FX, FR, MI, PL,
// BV) and OBJSENSE MIN/MAX; a MAX objective is negated. Integer columns must
// end up with bounds [0,1]. Throws FormatError on anything else.
MpsModel import_mps(std::istream& in);
MpsModel read_mps(const std::filesystem::path& path);

// Shortest decimal text of at most 12 characters for v.
std::string mps_number(double v);

}  // namespace floodguard
