#pragma once

#include <json.hpp>
#include <string>

#include "nlframe/common.hpp"
#include "nlframe/solvers.hpp"

namespace nlframe {

// Matrix/vector files: plain CSV (row-major) or the JSON wrapper
// { "rows": m, "cols": n, "data": [...] }. Values are written with enough
// digits for 1e-15-relative round trips.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_json(const std::string& path);
void write_matrix_json(const std::string& path, const Matrix& m);
Matrix read_matrix_any(const std::string& path);  // dispatch on extension
Vector read_vector_any(const std::string& path);  // single row or column
void write_vector_csv(const std::string& path, const Vector& v);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

// iter,residual,ratio,err_l2,err_linf (error columns blank without ground truth)
void write_trace_csv(const std::string& path, const SolverReport& rep,
                     const Vector* x_true = nullptr);

}  // namespace nlframe
