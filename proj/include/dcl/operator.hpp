#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dcl/grid_function.hpp"
#include "dcl/shift.hpp"

namespace dcl {

/// Worker count: DCL_THREADS if set and positive, else the hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DCL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

/// Runs body(k) for k in [0, count). Each index is handled by exactly one
/// worker, so results written per index do not depend on the thread count.
/// Nested calls run serially; the exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
  if (detail::inside_parallel_region) workers = 1;
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> failed_at(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::inside_parallel_region = true;
      for (std::size_t k = w; k < count; k += workers) {
        try {
          body(k);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = k;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
  if (errors[static_cast<std::size_t>(first)]) std::rethrow_exception(errors[static_cast<std::size_t>(first)]);
}

/// Linear operator on grid functions of a fixed shape.
struct Operator {
  int dimension = 1;
  int resolution = 1;
  std::string name;
  std::function<GridFunction(const GridFunction&)> apply;

  GridFunction operator()(const GridFunction& f) const {
    if (f.dimension() != dimension || f.resolution() != resolution) {
      throw dimension_mismatch(name + " expects dimension " + std::to_string(dimension) +
                               " at resolution " + std::to_string(resolution));
    }
    return apply(f);
  }
};

inline Operator identity_operator(int dimension, int resolution) {
  return {dimension, resolution, "identity", [](const GridFunction& f) { return f; }};
}

inline Operator zero_operator(int dimension, int resolution) {
  return {dimension, resolution, "zero",
          [](const GridFunction& f) { return GridFunction(f.dimension(), f.resolution()); }};
}

inline Operator shift_operator(int resolution, std::optional<ScaleWindow> window = std::nullopt) {
  return {1, resolution, "S", [window](const GridFunction& f) { return apply_S(f, window); }};
}

inline Operator coordinate_shift_operator(int resolution, int axis,
                                          std::optional<ScaleWindow> window = std::nullopt) {
  return {2, resolution, "S" + std::to_string(axis),
          [axis, window](const GridFunction& f) { return apply_S_coordinate(f, axis, window); }};
}

inline Operator tensor_shift_operator(int resolution, std::optional<ScaleWindow> window = std::nullopt) {
  return {2, resolution, "S1S2",
          [window](const GridFunction& f) { return apply_tensor_shift(f, window); }};
}

inline Operator general_shift_operator(ShiftSpec spec, int resolution,
                                       std::optional<ScaleWindow> window = std::nullopt) {
  spec.require_resolution(resolution);
  return {1, resolution, "T",
          [spec = std::move(spec), window](const GridFunction& f) {
            return apply_general_shift(spec, f, window);
          }};
}

/// [T,b] f = T(b f) - b T(f).
inline Operator commutator_operator(Operator base, GridFunction symbol) {
  if (symbol.dimension() != base.dimension || symbol.resolution() != base.resolution) {
    throw dimension_mismatch("symbol shape does not match the operator");
  }
  const int d = base.dimension;
  const int n = base.resolution;
  std::string name = "[" + base.name + ",b]";
  return {d, n, std::move(name),
          [base = std::move(base), b = std::move(symbol)](const GridFunction& f) {
            return base(b * f) - b * base(f);
          }};
}

/// Largest resolution whose dense matrix is still formed: N * dimension <= 14.
inline constexpr int max_materialized_cells_log2 = 14;

inline void require_materializable(int dimension, int resolution) {
  if (resolution * dimension > max_materialized_cells_log2) {
    throw dimension_too_large("cannot materialize 2^" + std::to_string(resolution * dimension) +
                              " cells (limit 2^" + std::to_string(max_materialized_cells_log2) + ")");
  }
}

/// Dense matrix of the operator in the cell-indicator basis; column k is op(e_k).
inline Eigen::MatrixXcd materialize(const Operator& op) {
  require_materializable(op.dimension, op.resolution);
  const auto cells = std::size_t{1} << (op.resolution * op.dimension);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(cells));
  parallel_for(cells, [&](std::size_t k) {
    GridFunction e(op.dimension, op.resolution);
    e[k] = 1.0;
    const auto col = op(e);
    for (std::size_t r = 0; r < cells; ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = col[r];
    }
  });
  return m;
}

/// Largest singular value of m and a unit right singular vector for it.
struct TopSingular {
  double value = 0.0;
  Eigen::VectorXcd right;
};

inline TopSingular top_singular(const Eigen::MatrixXcd& m) {
  TopSingular out;
  const Eigen::Index n = m.cols();
  if (n == 0) return out;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::MatrixXd re = m.real();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(re.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    out.value = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
    out.right = es.eigenvectors().col(n - 1).cast<scalar>();
  } else {
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    out.value = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
    out.right = es.eigenvectors().col(n - 1);
  }
  return out;
}

}  // namespace dcl
