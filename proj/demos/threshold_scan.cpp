/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

// Scans the qubit depolarizing family rho -> lambda*rho + (1-lambda)*I/2 in
// its state form and prints, for each noise level, the classification
// verdict, the witness or certificate that backs it, and the transfer-matrix
// diagonal sum whose value 3*lambda crosses the breaking threshold at 1.

#include <iomanip>
#include <iostream>

#include <ebtkit/basis_repr.hpp>
#include <ebtkit/ebt_analysis.hpp>

using namespace ebtkit;

namespace {

ChoiMatrix depolarizing(double lambda) {
  ComplexMatrix beta = maximally_entangled(2).projector();
  ComplexMatrix mixed = ComplexMatrix::Identity(4, 4) / 4.0;
  return ChoiMatrix(lambda * beta + (1.0 - lambda) * mixed, 2, 2);
}

const char* verdict_name(EbtStatus s) {
  switch (s) {
    case EbtStatus::ebt: return "EBT";
    case EbtStatus::not_ebt: return "NotEBT";
    default: return "Undecided";
  }
}

}  // namespace

int main() {
  OperatorBasis basis = gell_mann_basis(2);
  std::cout << std::fixed << std::setprecision(4);
  std::cout << std::setw(8) << "lambda" << std::setw(12) << "verdict"
            << std::setw(12) << "diag sum" << "  evidence\n";

  for (int i = 0; i <= 10; ++i) {
    double lambda = 0.1 * i;
    ChoiMatrix choi = depolarizing(lambda);
    EbtVerdict verdict = classify(Channel(choi));
    DiagNecessaryResult dn =
        ebt_diag_necessary(transfer_matrix(Channel(choi), basis));

    std::cout << std::setw(8) << lambda << std::setw(12)
              << verdict_name(verdict.status) << std::setw(12)
              << dn.diagonal_sum << "  ";
    if (verdict.witness)
      std::cout << verdict.witness->test << " test, value "
                << verdict.witness->value;
    else if (verdict.certificate)
      std::cout << "measure-and-prepare form with "
                << verdict.certificate->pairs().size() << " pairs, residual "
                << std::scientific << verdict.certificate_residual
                << std::fixed;
    std::cout << "\n";
  }
  return 0;
}
