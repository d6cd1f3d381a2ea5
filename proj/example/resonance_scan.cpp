// Scans k for the largest spikes of ||S_io||, ||A_I^-1|| and the augmented
// pseudo-inverse, for one choice of media, and prints the peaks found.
//
//   resonance_scan [ni] [no] [kmax]

#include <cstdio>
#include <cstdlib>

#include "tbie/sweep.hpp"

int main(int argc, char** argv) {
  tbie::SweepConfig cfg;
  cfg.n_i = argc > 1 ? std::atof(argv[1]) : 3.0;
  cfg.n_o = argc > 2 ? std::atof(argv[2]) : 1.0;
  cfg.kmax = argc > 3 ? std::atof(argv[3]) : 10.0;
  cfg.kstep = 0.01;
  cfg.operators = {tbie::FamilyName::S_io, tbie::FamilyName::A_I_inv, tbie::FamilyName::Aug_I};

  const auto res = tbie::run_sweep(cfg);
  std::printf("circle, n_i = %g, n_o = %g, k in [%g, %g]\n", cfg.n_i, cfg.n_o, cfg.kmin, cfg.kmax);
  for (auto op : cfg.operators) {
    const auto peaks = tbie::sweep_spikes(res, op);
    std::printf("%-8s %zu spike(s)", std::string(tbie::to_string(op)).c_str(), peaks.size());
    for (const auto& p : peaks) std::printf("  k=%.2f (x%.0f)", p.k, p.ratio);
    std::printf("\n");
  }
  return 0;
}
