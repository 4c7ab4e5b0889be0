// Potentialness of a few games, a blend, and one learning run.
#include <iostream>

#include "potlab/potlab.hpp"

int main() {
  using namespace potlab;
  OperatorCache cache;  // in-memory only

  const NormalFormGame pd = prisoners_dilemma();
  const NormalFormGame shapley = shapley_game();
  std::cout << "prisoners dilemma P = " << *potentialness(*cache.get(pd.shape()), pd) << "\n";
  std::cout << "shapley game      P = " << *potentialness(*cache.get(shapley.shape()), shapley) << "\n";

  const NormalFormGame auction = build_econ_game(EconGameSpec::two_player(EconKind::fpsb, 11));
  const auto ops = cache.get(auction.shape());
  const DecompositionResult dec = decompose_payoffs(*ops, auction);
  std::cout << "fpsb 11x11        P = " << *dec.potentialness << "\n";

  const NormalFormGame half = alpha_blend(dec, 0.5);
  std::cout << "half blend        P = " << *potentialness(*ops, half) << "\n";

  const Trajectory t = run_omd(auction, uniform_init(auction.shape()), econ_omd());
  std::cout << "omd on fpsb: converged=" << t.converged << " after " << t.iterations_used << " iterations\n";
}
