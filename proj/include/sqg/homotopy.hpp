#pragma once

// Homotopy groups of the spectrum attached to a square group via the
// two-periodic complex
//   ... -(Id-T)-> M_ee -(Id+T)-> M_ee -(Id-T)-> M_ee -P-> M_e,
// together with the first Postnikov invariant and the computable torsion
// specializations.

#include "sqg/sqcore.hpp"
#include "sqg/tensor.hpp"

namespace sqg {

FgAbelianGroup spectrum_homotopy(const SquareGroup& m, std::size_t degree);
std::vector<FgAbelianGroup> spectrum_homotopy_range(const SquareGroup& m, std::size_t max_degree);
// the periodic part as an honest chain complex (degrees 1..len)
ChainComplexZ spectrum_complex(const SquareGroup& m, std::size_t length);

struct KPostnikov {
  FgAbelianGroup pi0, pi1;
  FgabHom k;  // pi0 -> pi1
};
KPostnikov k_postnikov(const SquareGroup& m);

// Tor of A-tensor square groups: (Tor1(A, M_ee))-tensor, zero above degree 1
SquareGroup tor1_atensor(const FgAbelianGroup& a, const SquareGroup& m);
// independent cross-check via the kernel of (F1)^t (.) M -> (F0)^t (.) M
Report tor1_atensor_crosscheck(const FgAbelianGroup& a, const SquareGroup& m);
FgAbelianGroup tor_ee(std::size_t degree, const SquareGroup& m, const SquareGroup& n);

// six-term sequence for 0 -> Z^t -(k)-> Z^t -> (Z/k)^t -> 0 against m
Report les_check_family(const SquareGroup& m, long long k);
Report two_periodicity(const SquareGroup& m, std::size_t upto);

}  // namespace sqg
