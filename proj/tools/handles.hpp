#pragma once

// Thin RAII layer over the C API. The harness sees the library only through this.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmo/bmo.h"

namespace harness {

class ApiError : public std::runtime_error {
public:
  ApiError(bmo_status status, const std::string& message) : std::runtime_error(message), status_(status) {}
  bmo_status status() const noexcept { return status_; }

private:
  bmo_status status_;
};

inline void check(bmo_status status) {
  if (status != BMO_OK) throw ApiError(status, bmo_last_error());
}

struct ProblemDeleter {
  void operator()(bmo_problem* p) const { bmo_problem_destroy(p); }
};
struct ModelDeleter {
  void operator()(bmo_model* m) const { bmo_model_destroy(m); }
};
struct RunDeleter {
  void operator()(bmo_run* r) const { bmo_run_destroy(r); }
};

using ProblemHandle = std::unique_ptr<bmo_problem, ProblemDeleter>;
using ModelHandle = std::unique_ptr<bmo_model, ModelDeleter>;
using RunHandle = std::unique_ptr<bmo_run, RunDeleter>;

inline std::string take_string(char* s) {
  std::string out(s ? s : "");
  bmo_string_free(s);
  return out;
}

inline ProblemHandle make_problem(const std::string& name) {
  bmo_problem* p = nullptr;
  check(bmo_problem_create(name.c_str(), &p));
  return ProblemHandle(p);
}

inline ModelHandle load_model_json(const std::string& text) {
  bmo_model* m = nullptr;
  check(bmo_model_from_json(text.c_str(), &m));
  return ModelHandle(m);
}

inline std::string model_json(const bmo_model* model, const std::string& meta) {
  char* out = nullptr;
  check(bmo_model_to_json(model, meta.empty() ? nullptr : meta.c_str(), &out));
  return take_string(out);
}

/// Row-major point matrix.
struct Points {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Points() = default;
  Points(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

} // namespace harness
