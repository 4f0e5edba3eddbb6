#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "l1stream/homotopy.hpp"
#include "l1stream/prox.hpp"
#include "l1stream/signals.hpp"
#include "l1stream/wavelet.hpp"

namespace py = pybind11;
using namespace l1stream;

namespace {

WaveletSpec make_spec(int block_length, int levels) {
  WaveletSpec spec;
  spec.block_length = block_length;
  spec.levels = levels;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_l1stream, m) {
  m.doc() = "streaming sparse recovery toolkit (core bindings)";

  m.def(
      "gen_signal",
      [](const std::string& kind, long total_length, int block_length) {
        SignalSpec spec;
        spec.kind = signal_kind_from_string(kind);
        spec.total_length = total_length;
        spec.block_length = block_length;
        return gen_signal(spec);
      },
      py::arg("kind"), py::arg("total_length"), py::arg("block_length") = 256,
      "Deterministic test signal with a leading zero block.");

  m.def(
      "dwt",
      [](const Eigen::VectorXd& x, int levels) {
        return dwt_block(x, make_spec(static_cast<int>(x.size()), levels));
      },
      py::arg("x"), py::arg("levels") = 5, "Periodized orthogonal wavelet analysis.");
  m.def(
      "idwt",
      [](const Eigen::VectorXd& a, int levels) {
        return idwt_block(a, make_spec(static_cast<int>(a.size()), levels));
      },
      py::arg("a"), py::arg("levels") = 5, "Periodized orthogonal wavelet synthesis.");
  m.def("dct", &dct_block, py::arg("x"), "Orthonormal DCT-II analysis.");
  m.def("idct", &idct_block, py::arg("a"), "Orthonormal DCT-II synthesis.");

  m.def("ser_db", &ser_db, py::arg("x_true"), py::arg("x_est"),
        "Signal-to-error ratio in dB, capped at 300.");

  m.def(
      "solve_weighted_l1",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
         const Eigen::VectorXd& weights, const Eigen::VectorXd& x_warm) {
        DenseOperator op(A);
        WeightedL1Problem prob;
        prob.A = &op;
        prob.y = y;
        prob.weights = weights;
        const Eigen::VectorXd start =
            x_warm.size() == 0 ? Eigen::VectorXd::Zero(A.cols())
                               : prune_dependent_support(op, x_warm);
        const SolveResult res =
            homotopy_solve(prob, compute_warm_start(prob, start));
        return py::make_tuple(res.x, res.step_count, res.kkt_residual);
      },
      py::arg("A"), py::arg("y"), py::arg("weights"),
      py::arg("x_warm") = Eigen::VectorXd(),
      "min ||W x||_1 + 1/2 ||A x - y||^2 by the homotopy path solver; "
      "returns (x, steps, kkt_residual).");

  m.def(
      "solve_weighted_l1_prox",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
         const Eigen::VectorXd& weights) {
        DenseOperator op(A);
        WeightedL1Problem prob;
        prob.A = &op;
        prob.y = y;
        prob.weights = weights;
        const ProxResult res =
            prox_gradient_solve(prob, Eigen::VectorXd::Zero(A.cols()));
        return py::make_tuple(res.x, res.iterations);
      },
      py::arg("A"), py::arg("y"), py::arg("weights"),
      "Accelerated proximal-gradient reference solver; returns (x, iterations).");
}
