// Small tour of the library: a random symbol, its commutator with the Haar shift,
// the BMO norms that bound it, and a non-degeneracy certificate for a random shift.

#include <cstdio>

#include "dcl/dcl.hpp"

int main() {
  const int n = 6;
  const auto b = dcl::random_symbol(7, 1, n, dcl::SymbolProfile::haar_gaussian);

  const dcl::CommutatorOp c(dcl::shift_operator(n), b);
  const auto norm = dcl::l2_operator_norm(c.as_operator());
  const auto testing = dcl::testing_lower_bound(c);
  const auto bmo = dcl::bmo_norm(b, 2.0);
  std::printf("1D, N = %d\n", n);
  std::printf("  ||[S,b]||          %.6f\n", norm.lower);
  std::printf("  testing bound      %.6f\n", testing.lower);
  std::printf("  dyadic BMO_2 of b  %.6f  (attained on [%lld/%lld, %lld/%lld))\n", bmo.value,
              static_cast<long long>(bmo.interval.index), 1LL << bmo.interval.level,
              static_cast<long long>(bmo.interval.index + 1), 1LL << bmo.interval.level);

  const int n2 = 4;
  const auto b2 = dcl::random_symbol(7, 2, n2, dcl::SymbolProfile::haar_gaussian);
  const dcl::CommutatorOp c2(dcl::tensor_shift_operator(n2), b2);
  std::printf("2D, N = %d\n", n2);
  std::printf("  ||[S1S2,b]||       %.6f\n", dcl::l2_operator_norm(c2.as_operator()).lower);
  std::printf("  little BMO_2 of b  %.6f\n", dcl::little_bmo_norm(b2, 2.0).value);
  std::printf("  rectangular BMO    %.6f\n", dcl::rectangular_bmo_norm(b2).value);

  const double modulus = 1.9;
  const auto spec = dcl::make_purely_mixing(1, modulus, 7, 8);
  const double constant = dcl::purely_mixing_constant(1, modulus);
  const auto report = dcl::check_nondegeneracy(spec, 8, constant);
  std::printf("purely mixing shift, i = 1, |a| <= %.1f/|I|, c = %.2f: %s (min c|I||a| = %.4f)\n", modulus, constant,
              report.pass() ? "non-degenerate" : "degenerate", report.worst_ratio);
  return 0;
}
