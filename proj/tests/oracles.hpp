#pragma once

// Brute-force reference implementations. Each one avoids the code path it
// checks: cubes are enumerated by raw index with membership decided by
// midpoint tests against every periodic image, and operators are summed
// directly in O(N^2).

#include <vector>

#include "sparsepdo/dyadic.hpp"
#include "sparsepdo/pdo.hpp"

namespace sparsepdo::oracle {

// T_a f(x_i) = L^-1 sum_k e^{i x_i xi_k} a(x_i, xi_k) fhat_k, fhat by direct sum.
GridFunction direct_T(const Symbol& a, const GridFunction& f);

struct BruteCube {
  double left = 0.0, side = 0.0;
  std::vector<Index> cells;
};

// Every cube of the three shifted grids meeting the lattice (1-D).
std::vector<BruteCube> brute_cubes(const Lattice& lat);

// x in [left - side, left + 2 side) modulo L; everything once 3 side >= L.
bool in_tripled(const BruteCube& q, double x, double L);

// sup over cubes containing x_i of <f>_{p,Q}.
std::vector<double> brute_maximal(const GridFunction& f, double p);

// sup over cubes containing x_i of max_Q |T(f 1_{(3Q)^c})|.
std::vector<double> brute_grand_maximal(const OperatorMatrix& T, const GridFunction& f);

// max over cubes containing supp f and supp g of |Q| <f>_{r,Q} <g>_{s',Q}.
double brute_single_cube(const GridFunction& f, const GridFunction& g, double r, double s_prime);

}  // namespace sparsepdo::oracle
