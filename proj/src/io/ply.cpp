#include "pose6d/io/ply.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "pose6d/core/error.hpp"

namespace pose6d {

namespace {

const std::set<std::string> kFloatTypes = {"float", "float32", "double", "float64"};
const std::set<std::string> kIntTypes = {"char",   "int8",   "uchar",  "uint8",
                                         "short",  "int16",  "ushort", "uint16",
                                         "int",    "int32",  "uint",   "uint32"};

struct Property {
  std::string name;
  bool integer = false;
};

bool next_line(std::istringstream& in, std::string& line, int& lineno) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++lineno;
  return true;
}

double parse_number(const std::string& token, int lineno) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + token.size() || token.empty())
    throw ParseError("malformed number '" + token + "'", lineno);
  if (!std::isfinite(value))
    throw ParseError("non-finite vertex value '" + token + "'", lineno);
  return value;
}

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

PointCloud read_ply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  if (!next_line(in, line, lineno) || line != "ply")
    throw ParseError("missing 'ply' magic", 1);

  bool saw_format = false;
  long vertex_count = -1;
  std::vector<Property> props;
  bool in_vertex_element = false;
  bool saw_end_header = false;

  while (next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word.empty() || word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      std::string kind, version;
      ls >> kind >> version;
      if (kind != "ascii")
        throw ParseError("unsupported format '" + kind + "' (only ascii 1.0)", lineno);
      if (version != "1.0")
        throw ParseError("unsupported PLY version '" + version + "'", lineno);
      saw_format = true;
    } else if (word == "element") {
      std::string name;
      long count = -1;
      ls >> name >> count;
      if (name != "vertex")
        throw ParseError("unsupported element '" + name + "'", lineno);
      if (vertex_count >= 0)
        throw ParseError("duplicate vertex element", lineno);
      if (count < 0 || ls.fail())
        throw ParseError("bad vertex count", lineno);
      vertex_count = count;
      in_vertex_element = true;
    } else if (word == "property") {
      if (!in_vertex_element)
        throw ParseError("property before any element", lineno);
      std::string type, name;
      ls >> type >> name;
      if (type == "list")
        throw ParseError("list properties are not supported", lineno);
      const bool is_float = kFloatTypes.count(type) != 0;
      const bool is_int = kIntTypes.count(type) != 0;
      if (!is_float && !is_int)
        throw ParseError("unknown property type '" + type + "'", lineno);
      if (name.empty()) throw ParseError("property without a name", lineno);
      for (const Property& p : props)
        if (p.name == name) throw ParseError("duplicate property '" + name + "'", lineno);
      props.push_back({name, is_int});
    } else if (word == "end_header") {
      saw_end_header = true;
      break;
    } else {
      throw ParseError("unrecognized header keyword '" + word + "'", lineno);
    }
  }

  if (!saw_end_header) throw ParseError("missing end_header", lineno);
  if (!saw_format) throw ParseError("missing format declaration", lineno);
  if (vertex_count < 0) throw ParseError("missing vertex element", lineno);

  int ix = -1, iy = -1, iz = -1;
  int inx = -1, iny = -1, inz = -1;
  int ir = -1, ig = -1, ib = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    const std::string& n = props[i].name;
    if (n == "x") ix = i;
    else if (n == "y") iy = i;
    else if (n == "z") iz = i;
    else if (n == "nx") inx = i;
    else if (n == "ny") iny = i;
    else if (n == "nz") inz = i;
    else if (n == "red") ir = i;
    else if (n == "green") ig = i;
    else if (n == "blue") ib = i;
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError("vertex element lacks x/y/z properties", lineno);
  const int have_n = (inx >= 0) + (iny >= 0) + (inz >= 0);
  const int have_c = (ir >= 0) + (ig >= 0) + (ib >= 0);
  if (have_n != 0 && have_n != 3)
    throw ParseError("normals need all of nx/ny/nz", lineno);
  if (have_c != 0 && have_c != 3)
    throw ParseError("colors need all of red/green/blue", lineno);

  // Rows accumulate as they parse, so a lying header cannot force a huge
  // allocation up front.
  const int n_props = static_cast<int>(props.size());
  std::vector<double> rows;
  long parsed = 0;
  while (parsed < vertex_count) {
    if (!next_line(in, line, lineno))
      throw ParseError("vertex count mismatch: expected " + std::to_string(vertex_count) +
                           " rows, found " + std::to_string(parsed),
                       lineno + 1);
    std::istringstream ls(line);
    std::string token;
    int got = 0;
    while (ls >> token) {
      if (got >= n_props)
        throw ParseError("extra values on vertex row", lineno);
      rows.push_back(parse_number(token, lineno));
      ++got;
    }
    if (got == 0) continue;  // blank line between rows
    if (got < n_props)
      throw ParseError("vertex row has " + std::to_string(got) + " of " +
                           std::to_string(n_props) + " values",
                       lineno);
    ++parsed;
  }
  while (next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string token;
    if (ls >> token) throw ParseError("data after the final vertex row", lineno);
  }

  PointCloud cloud;
  cloud.points.resize(parsed, 3);
  if (have_n) cloud.normals.resize(parsed, 3);
  if (have_c) cloud.colors.resize(parsed, 3);
  for (long i = 0; i < parsed; ++i) {
    const double* row = rows.data() + i * n_props;
    cloud.points.row(i) << row[ix], row[iy], row[iz];
    if (have_n) cloud.normals.row(i) << row[inx], row[iny], row[inz];
    if (have_c) {
      cloud.colors.row(i) << row[ir], row[ig], row[ib];
      if (props[ir].integer) cloud.colors.row(i) /= 255.0;
    }
  }
  return cloud;
}

std::string write_ply(const PointCloud& cloud) {
  cloud.validate();
  const int n = cloud.size();
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << n << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals())
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (cloud.has_colors())
    out << "property float red\nproperty float green\nproperty float blue\n";
  out << "end_header\n";
  for (int i = 0; i < n; ++i) {
    out << format9(cloud.points(i, 0)) << ' ' << format9(cloud.points(i, 1)) << ' '
        << format9(cloud.points(i, 2));
    if (cloud.has_normals())
      out << ' ' << format9(cloud.normals(i, 0)) << ' ' << format9(cloud.normals(i, 1))
          << ' ' << format9(cloud.normals(i, 2));
    if (cloud.has_colors())
      out << ' ' << format9(cloud.colors(i, 0)) << ' ' << format9(cloud.colors(i, 1))
          << ' ' << format9(cloud.colors(i, 2));
    out << '\n';
  }
  return out.str();
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_ply(buf.str());
}

void save_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << write_ply(cloud);
}

}  // namespace pose6d
