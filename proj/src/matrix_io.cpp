#include "spdgeo/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spdgeo::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw InvalidInput("format_double: conversion failed");
  return std::string(buf, ptr);
}

Mat parse_csv(const std::string& text, std::vector<std::string>* header) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (!parse_number(cells[j], row[j])) numeric = false;
    if (!numeric) {
      if (first) {
        if (header) *header = cells;
        cols = cells.size();
        first = false;
        continue;
      }
      throw InvalidInput("parse_csv: non-numeric cell on line " + std::to_string(line_no));
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw InvalidInput("parse_csv: ragged row on line " + std::to_string(line_no));
    rows.push_back(std::move(row));
    first = false;
  }
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

std::string to_csv(const Mat& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  if (!header.empty()) out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string to_json_envelope(const Mat& m) {
  if (m.rows() != m.cols()) throw InvalidInput("to_json_envelope: matrix is not square");
  nlohmann::ordered_json j;
  j["dim"] = m.rows();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  j["data"] = data;
  return j.dump() + "\n";
}

Mat parse_json_envelope(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("matrix JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("data"))
    throw InvalidInput("matrix JSON: expected keys \"dim\" and \"data\"");
  const auto d = j.at("dim").get<Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (d <= 0 || static_cast<Index>(data.size()) != d * d)
    throw InvalidInput("matrix JSON: data length does not match dim^2");
  Mat m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k) m(i, k) = data[static_cast<std::size_t>(i * d + k)];
  return m;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

Mat read_matrix(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto pos = text.find_first_not_of(" \t\r\n");
  const bool json =
      path.extension() == ".json" || (pos != std::string::npos && text[pos] == '{');
  Mat m = json ? parse_json_envelope(text) : parse_csv(text);
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InvalidInput(path.string() + ": expected a non-empty square matrix");
  return m;
}

Spd read_spd(const std::filesystem::path& path) { return Spd(read_matrix(path)); }

void write_matrix(const std::filesystem::path& path, const Mat& m) {
  write_text(path, path.extension() == ".json" ? to_json_envelope(m) : to_csv(m));
}

}  // namespace spdgeo::io
