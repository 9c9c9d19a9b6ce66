#pragma once

#include "leakywire/parallel.hpp"

#include <array>

namespace leakywire {

// Accumulates result[o] = iint K_o(s, t) e_m(s) e_n(t) over all panel pairs.
// point_fn(x, k) writes the kernel values K_o at pair point x into k[0..outputs).
template <class F>
void QOperator::pair_loop(int outputs, F&& point_fn, std::vector<Eigen::MatrixXd>& result) const {
  const PanelMesh& mesh = basis_.mesh();
  const int np = mesh.size();
  const int n = basis_.size();
  const int workers = std::max(1, std::min(options_.workers, np));
  std::vector<std::vector<Eigen::MatrixXd>> acc(
      workers, std::vector<Eigen::MatrixXd>(outputs, Eigen::MatrixXd::Zero(n, n)));
  PairQuadrature pq(mesh);
  parallel_for(np, workers, [&](int p, int w) {
    std::vector<PairPoint> pts;
    const auto& aP = basis_.active(p);
    const int nP = int(aP.size());
    std::vector<double> vP(nP), vQ;
    std::vector<double> k(outputs);
    std::vector<Eigen::MatrixXd> loc(outputs);
    for (int q = p; q < np; ++q) {
      const auto& aQ = basis_.active(q);
      const int nQ = int(aQ.size());
      vQ.resize(nQ);
      for (auto& m : loc) m.setZero(nP, nQ);
      pts.clear();
      pq.generate(p, q, pts);
      for (const auto& x : pts) {
        point_fn(x, k.data());
        basis_.evaluate(p, x.s, vP.data());
        basis_.evaluate(q, x.t, vQ.data());
        for (int o = 0; o < outputs; ++o) {
          double wk = x.w * k[o];
          auto& m = loc[o];
          for (int i = 0; i < nP; ++i) {
            double a = wk * vP[i];
            for (int j = 0; j < nQ; ++j) m(i, j) += a * vQ[j];
          }
        }
      }
      for (int o = 0; o < outputs; ++o) {
        auto& g = acc[w][o];
        const auto& m = loc[o];
        for (int i = 0; i < nP; ++i)
          for (int j = 0; j < nQ; ++j) {
            g(aP[i], aQ[j]) += m(i, j);
            if (q != p) g(aQ[j], aP[i]) += m(i, j);
          }
      }
    }
  });
  result.assign(outputs, Eigen::MatrixXd::Zero(n, n));
  for (int o = 0; o < outputs; ++o) {
    for (int w = 0; w < workers; ++w) result[o] += acc[w][o];
    result[o] = 0.5 * (result[o] + result[o].transpose()).eval();
  }
}

}  // namespace leakywire
