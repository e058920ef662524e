#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chordflow/convex_body.hpp"
#include "chordflow/flow.hpp"

namespace chordflow {

// "%.17g"
std::string format_double(double v);

// f descriptors: const:<v>, fourier:<a0>[,cos<k>=<a>][,sin<k>=<b>]..., table:<path>.
// Fourier terms are in the polar angle for n = 2 and the longitude for n = 3; positivity
// is checked on a 4x denser sampling. NotPositive / InvalidConfig / Io.
std::vector<double> make_f(const std::string& descriptor, const SphereGrid& grid);

// disk:<R>, ellipse:<a>,<b>, table:<path> (support values in node order).
// ConvexityLoss when the body is not strictly convex.
ConvexBody make_initial(const std::string& descriptor, const GridPtr& grid);

// One value per node: a single column, or the column named `column` of a headed CSV.
std::vector<double> read_column_csv(const std::filesystem::path& path, const std::string& column);

void write_solution_csv(const std::filesystem::path& path, const ConvexBody& body);
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows);
void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries);
// Reads key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
// Boundary polylines of both bodies in an 800x800 view box (n = 2).
void write_outline_svg(const std::filesystem::path& path, const ConvexBody& initial,
                       const ConvexBody& final_body);

}  // namespace chordflow
