#include "aspdhg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aspdhg {

namespace {

std::string trim(std::string const &s)
{
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) { return {}; }
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ofstream open_out(std::filesystem::path const &path, std::ios::openmode mode = std::ios::out)
{
  std::ofstream os(path, mode);
  if (!os) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  return os;
}

std::ifstream open_in(std::filesystem::path const &path, std::ios::openmode mode = std::ios::in)
{
  std::ifstream is(path, mode);
  if (!is) { throw std::runtime_error("cannot open " + path.string()); }
  return is;
}

} // namespace

void write_pgm(std::filesystem::path const &path, Vector const &pixels, Index side)
{
  if (pixels.size() != side * side) { throw ConfigError("write_pgm: pixel count does not match side"); }
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << "P5\n" << side << ' ' << side << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<std::size_t>(pixels.size()));
  for (Index k = 0; k < pixels.size(); ++k) {
    double const v = std::isfinite(pixels[k]) ? std::clamp(pixels[k], 0.0, 1.0) : 0.0;
    bytes[static_cast<std::size_t>(k)] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  os.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

GrayImage read_pgm(std::filesystem::path const &path)
{
  auto is = open_in(path, std::ios::in | std::ios::binary);
  std::string magic;
  int maxval = 0;
  GrayImage img;
  is >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0) {
    throw std::runtime_error("read_pgm: unsupported file " + path.string());
  }
  is.get();
  img.data.resize(static_cast<std::size_t>(img.width * img.height));
  is.read(reinterpret_cast<char *>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!is) { throw std::runtime_error("read_pgm: truncated file " + path.string()); }
  return img;
}

Matrix read_csv_matrix(std::istream &is)
{
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) { continue; }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::string const t = trim(cell);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (std::exception const &) {
        used = 0;
      }
      if (used == 0 || used != t.size()) { throw ConfigError("read_csv_matrix: bad number '" + cell + "'"); }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) { throw ConfigError("read_csv_matrix: ragged rows"); }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) { throw ConfigError("read_csv_matrix: empty matrix"); }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) { m(r, c) = rows[r][c]; }
  }
  return m;
}

Matrix read_csv_matrix(std::filesystem::path const &path)
{
  auto is = open_in(path);
  return read_csv_matrix(is);
}

LinearMap load_dense_csv(std::filesystem::path const &path)
{
  return LinearMap::from_dense(read_csv_matrix(path));
}

void write_sinogram_csv(std::filesystem::path const &path, Vector const &sino, Index n_angles, Index n_detectors)
{
  if (sino.size() != n_angles * n_detectors) { throw ConfigError("write_sinogram_csv: size mismatch"); }
  auto os = open_out(path);
  char buf[32];
  for (Index a = 0; a < n_angles; ++a) {
    for (Index j = 0; j < n_detectors; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", sino[a * n_detectors + j]);
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

std::map<std::string, std::string> parse_ini(std::istream &is)
{
  std::map<std::string, std::string> out;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto const cut = line.find_first_of("#;");
    if (cut != std::string::npos) { line.erase(cut); }
    line = trim(line);
    if (line.empty()) { continue; }
    if (line.front() == '[') {
      if (line.back() != ']') { throw ConfigError("config line " + std::to_string(lineno) + ": bad section"); }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto const eq = line.find('=');
    if (eq == std::string::npos) { throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value"); }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) { throw ConfigError("config line " + std::to_string(lineno) + ": empty key"); }
    out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_ini(std::filesystem::path const &path)
{
  auto is = open_in(path);
  return parse_ini(is);
}

} // namespace aspdhg
