#include "nlframe/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nlframe {

namespace {

std::string ext_of(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string e = path.substr(dot + 1);
  for (auto& c : e) c = static_cast<char>(std::tolower(c));
  return e;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << content;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
      row.push_back(std::stod(cell));
    }
    if (row.empty()) continue;
    if (!rows.empty())
      require(row.size() == rows.front().size(), path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), path + ": empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  write_text(path, os.str());
}

Matrix read_matrix_json(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_text(path));
  require(j.contains("rows") && j.contains("cols") && j.contains("data"),
          path + ": expected {rows, cols, data}");
  const Eigen::Index rows = j["rows"].get<Eigen::Index>();
  const Eigen::Index cols = j["cols"].get<Eigen::Index>();
  auto data = j["data"].get<std::vector<double>>();
  require(static_cast<Eigen::Index>(data.size()) == rows * cols,
          path + ": data length != rows*cols");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)];
  return m;
}

void write_matrix_json(const std::string& path, const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  write_json(path, {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}});
}

Matrix read_matrix_any(const std::string& path) {
  return ext_of(path) == "json" ? read_matrix_json(path) : read_matrix_csv(path);
}

Vector read_vector_any(const std::string& path) {
  Matrix m = read_matrix_any(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw InvalidInput(path + ": expected a single-row or single-column vector");
}

void write_vector_csv(const std::string& path, const Vector& v) {
  write_matrix_csv(path, v);
}

void write_trace_csv(const std::string& path, const SolverReport& rep,
                     const Vector* x_true) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "iter,residual,ratio,err_l2,err_linf\n";
  for (std::size_t n = 0; n < rep.residuals.size(); ++n) {
    os << (n + 1) << ',' << rep.residuals[n] << ',';
    if (n >= 1) os << rep.ratios[n - 1];
    os << ',';
    // iterates are thinned; emit errors only where the iterate was kept
    std::size_t idx = n + 1;
    if (x_true != nullptr && idx < rep.iterates.size() &&
        rep.iterates[idx].size() == x_true->size()) {
      Vector d = rep.iterates[idx] - *x_true;
      os << d.norm() << ',' << d.lpNorm<Eigen::Infinity>();
    } else {
      os << ',';
    }
    os << '\n';
  }
  write_text(path, os.str());
}

}  // namespace nlframe
