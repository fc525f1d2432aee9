#pragma once

#include "aspdhg/linop.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <string>

namespace aspdhg {

/// Binary PGM (P5, maxval 255, row-major). Values are clipped to [0, 1].
void write_pgm(std::filesystem::path const &path, Vector const &pixels, Index side);

struct GrayImage
{
  Index width = 0;
  Index height = 0;
  std::vector<unsigned char> data;
};
GrayImage read_pgm(std::filesystem::path const &path);

/// One row per line, comma-separated.
Matrix read_csv_matrix(std::istream &is);
Matrix read_csv_matrix(std::filesystem::path const &path);
LinearMap load_dense_csv(std::filesystem::path const &path);

/// Sinogram as an n_angles x n_detectors CSV table.
void write_sinogram_csv(std::filesystem::path const &path, Vector const &sino, Index n_angles, Index n_detectors);

/**
 * INI-style `key = value` text. Keys inside `[section]` are returned as
 * "section.key"; `#` and `;` start comments.
 */
std::map<std::string, std::string> parse_ini(std::istream &is);
std::map<std::string, std::string> parse_ini(std::filesystem::path const &path);

} // namespace aspdhg
