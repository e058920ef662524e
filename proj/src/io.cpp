#include "chordflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "chordflow/errors.hpp"

namespace chordflow {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "cannot parse number '" + text + "' in " + context);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

struct FourierTerm {
  bool cosine;
  int k;
  double amp;
};

double fourier_value(double a0, const std::vector<FourierTerm>& terms, double angle) {
  double v = a0;
  for (const auto& t : terms) v += t.amp * (t.cosine ? std::cos(t.k * angle) : std::sin(t.k * angle));
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> read_column_csv(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  int index = -1;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (first) {
      first = false;
      const auto it = std::find(cells.begin(), cells.end(), column);
      if (it != cells.end()) {
        index = static_cast<int>(it - cells.begin());
        continue;
      }
      if (cells.size() != 1) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": no column named '" + column + "'");
      }
      index = 0;
    }
    if (static_cast<std::size_t>(index) >= cells.size()) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ": short row");
    }
    values.push_back(parse_number(cells[index], path.string()));
  }
  return values;
}

std::vector<double> make_f(const std::string& descriptor, const SphereGrid& grid) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "f descriptor needs a kind prefix: " + descriptor);
  }
  const std::string kind = descriptor.substr(0, colon);
  const std::string body = descriptor.substr(colon + 1);
  std::vector<double> f(grid.size());
  if (kind == "const") {
    std::fill(f.begin(), f.end(), parse_number(body, "f"));
  } else if (kind == "fourier") {
    const auto parts = split(body, ',');
    if (parts.empty() || parts[0].empty()) throw Error(ErrorCode::InvalidConfig, "fourier needs a0");
    const double a0 = parse_number(parts[0], "f");
    std::vector<FourierTerm> terms;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const auto eq = parts[k].find('=');
      const std::string name = parts[k].substr(0, eq);
      if (eq == std::string::npos || name.size() < 4 ||
          (name.compare(0, 3, "cos") != 0 && name.compare(0, 3, "sin") != 0)) {
        throw Error(ErrorCode::InvalidConfig, "fourier term must look like cos<k>=<a>: " + parts[k]);
      }
      const int order = static_cast<int>(parse_number(name.substr(3), "f"));
      terms.push_back({name[0] == 'c', order, parse_number(parts[k].substr(eq + 1), "f")});
    }
    const int dense = 4 * (grid.dim() == 2 ? static_cast<int>(grid.size()) : grid.longitudes());
    for (int k = 0; k < dense; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / dense;
      if (!(fourier_value(a0, terms, angle) > 0.0)) {
        throw Error(ErrorCode::NotPositive, "f must be positive; fourier series is not at angle " +
                                                format_double(angle));
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec3& x = grid.node(i);
      f[i] = fourier_value(a0, terms, std::atan2(x[1], x[0]));
    }
  } else if (kind == "table") {
    f = read_column_csv(body, "f");
    if (f.size() != grid.size()) {
      throw Error(ErrorCode::ShapeMismatch, "f table has " + std::to_string(f.size()) +
                                                " rows, grid has " + std::to_string(grid.size()));
    }
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown f kind '" + kind + "'");
  }
  for (double v : f) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NotPositive, "f must be positive at every node");
    }
  }
  return f;
}

ConvexBody make_initial(const std::string& descriptor, const GridPtr& grid) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "init descriptor needs a kind prefix: " + descriptor);
  }
  const std::string kind = descriptor.substr(0, colon);
  const std::string body = descriptor.substr(colon + 1);
  std::optional<ConvexBody> out;
  if (kind == "disk") {
    out.emplace(make_disk(grid, parse_number(body, "init")));
  } else if (kind == "ellipse") {
    const auto parts = split(body, ',');
    if (parts.size() != 2) throw Error(ErrorCode::InvalidConfig, "ellipse needs a,b");
    out.emplace(make_ellipse(grid, parse_number(parts[0], "init"), parse_number(parts[1], "init")));
  } else if (kind == "table") {
    auto h = read_column_csv(body, "h");
    if (h.size() != grid->size()) {
      throw Error(ErrorCode::ShapeMismatch, "init table has " + std::to_string(h.size()) +
                                                " rows, grid has " + std::to_string(grid->size()));
    }
    out.emplace(grid, std::move(h));
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown init kind '" + kind + "'");
  }
  out->require_strictly_convex();
  return *out;
}

void write_solution_csv(const std::filesystem::path& path, const ConvexBody& body) {
  auto out = open_out(path);
  const bool three = body.dim() == 3;
  out << "node_index,x,y," << (three ? "z," : "") << "h,rho,K\n";
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Vec3& x = body.grid().node(i);
    out << i << ',' << format_double(x[0]) << ',' << format_double(x[1]) << ',';
    if (three) out << format_double(x[2]) << ',';
    out << format_double(body.h(i)) << ',' << format_double(radial_from_support(body, x)) << ','
        << format_double(1.0 / body.radii_product(i)) << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows) {
  auto out = open_out(path);
  out << "step,t,dt,theta,I_q,Phi,h_min,h_max,grad_h_max,kappa_min,kappa_max,rhs_sup,"
         "ma_residual_sup\n";
  for (const auto& r : rows) {
    out << r.step;
    for (double v : {r.t, r.dt, r.theta, r.I_q, r.Phi, r.h_min, r.h_max, r.grad_h_max, r.kappa_min,
                     r.kappa_max, r.rhs_sup, r.ma_residual_sup}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(path);
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void write_outline_svg(const std::filesystem::path& path, const ConvexBody& initial,
                       const ConvexBody& final_body) {
  if (initial.dim() != 2) throw Error(ErrorCode::InvalidConfig, "outline is planar only");
  double extent = 0.0;
  for (const ConvexBody* b : {&initial, &final_body}) {
    for (const auto& p : b->boundary_points()) extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
  }
  const double scale = 360.0 / extent;
  auto polyline = [&](const ConvexBody& b, const char* colour) {
    std::string s = "  <polygon fill=\"none\" stroke=\"";
    s += colour;
    s += "\" stroke-width=\"2\" points=\"";
    char buf[64];
    for (const auto& p : b.boundary_points()) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", 400.0 + scale * p[0], 400.0 - scale * p[1]);
      s += buf;
    }
    s += "\"/>\n";
    return s;
  };
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n"
      << "  <rect width=\"800\" height=\"800\" fill=\"white\"/>\n"
      << "  <circle cx=\"400\" cy=\"400\" r=\"3\" fill=\"black\"/>\n"
      << polyline(initial, "#999999") << polyline(final_body, "#c0392b") << "</svg>\n";
}

}  // namespace chordflow
