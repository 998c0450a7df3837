#pragma once

#include <cblas.h>

namespace ntc {

extern "C" {
void openblas_set_num_threads(int);
}

// Single threaded BLAS keeps results bit reproducible across machines with
// the same build and keeps the one core sandbox honest.
inline void ensure_single_thread_blas() {
  static bool done = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)done;
}

// Row major C[m x n] = alpha * op(A) * op(B) + beta * C.
inline void gemm_rm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a,
                    int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  ensure_single_thread_blas();
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m,
              n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace ntc
