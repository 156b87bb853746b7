#pragma once

// Line-oriented text formats. Each file starts with "<format> <version>";
// '#' starts a comment; numbers use 17 significant digits and "inf".

#include <iosfwd>
#include <string>
#include <vector>

#include "mdist/bifiltration.hpp"
#include "mdist/diagram.hpp"
#include "mdist/matching_distance.hpp"
#include "mdist/pareto_grid.hpp"
#include "mdist/special_sets.hpp"

namespace mdist {

/// Raised for unreadable or malformed input files.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string format_number(double v);
std::string format_number(const ExtendedReal& v);
/// Parses a decimal number or "inf"; throws InputError.
ExtendedReal parse_extended(const std::string& token);
double parse_finite(const std::string& token);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Diagrams: "mdist-diagram 1", records "degree birth death multiplicity".
std::string write_diagrams(const std::vector<PersistenceDiagram>& diagrams);
std::vector<PersistenceDiagram> read_diagrams(const std::string& text);

// Meshes: OFF geometry plus a "mdist-values 1" sidecar with one value pair
// per vertex.
struct MeshFile {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
};
std::string write_off(const SurfaceMesh& mesh);
MeshFile read_off(const std::string& text);
std::string write_values(const std::vector<Value2>& values);
std::vector<Value2> read_values(const std::string& text);
/// Default sidecar path: "<mesh>.values".
std::string values_path_for(const std::string& mesh_path);
BifilteredComplex load_mesh_complex(const std::string& mesh_path,
                                    const std::string& values_path = "");

// Grids: "mdist-grid 1", records "vertical <tag> x0 y0",
// "horizontal <tag> x0 y0", "proper <tag> n x1 y1 ... xn yn".
std::string write_grid(const ExtendedParetoGrid& grid);
ExtendedParetoGrid read_grid(const std::string& text);

// Candidate samples: "mdist-candidates 1", records
// "a b kind residual n g:i ... m c ...".
std::string write_candidates(const std::vector<CandidateSample>& samples);
std::vector<CandidateSample> read_candidates(const std::string& text);

// Estimate reports: "mdist-report 1" with summary keys and per-line records
// "line a b cost d0 d1 ...".
std::string write_report(const EstimateReport& report);
EstimateReport read_report(const std::string& text);

// Verification: "mdist-verify 1" with both reports embedded.
std::string write_verify(const VerifyReport& report);
VerifyReport read_verify(const std::string& text);

/// First token of the first line, e.g. "mdist-grid".
std::string detect_format(const std::string& text);

}  // namespace mdist
