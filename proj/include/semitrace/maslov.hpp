/*
 * Copyright 2026 The semitrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/** \file maslov.hpp
 *
 *  \brief Maslov index of a curve of linear symplectomorphisms.
 *
 *  For a path t -> S(t) in Sp(2m) with graphs Gamma(t) in T*R^m x T*R^m,
 *
 *      mu = 1/2 sum_j ( s(Gamma(t_{j-1}), Delta, M_j) - s(Gamma(t_j), Delta, M_j) ),
 *
 *  where each M_j is a Lagrangian transversal to Delta and to Gamma(t) on
 *  [t_{j-1}, t_j]. Transversals are drawn at random and certified on a
 *  sampled grid; the subdivision is refined dyadically until a certified
 *  transversal exists.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "semitrace/symplectic.hpp"

namespace semitrace {

/// A continuous curve of symplectic matrices on [t_begin, t_end], evaluable anywhere.
class SymplecticPath {
 public:
  using Evaluator = std::function<Matrix(double)>;

  SymplecticPath(double t_begin, double t_end, Evaluator eval, int samples = 17,
                 double symplectic_tol = 1e-8);

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  int dim() const { return dim_; }
  double symplectic_tol() const { return tol_; }

  /// S(t); validated as symplectic at the path tolerance.
  Matrix operator()(double t) const;

  struct Sample {
    double t;
    Matrix s;
  };
  const std::vector<Sample>& samples() const { return samples_; }

  /// Path traversed in the opposite direction, reparametrized to the same interval.
  SymplecticPath reversed() const;

 private:
  double t_begin_;
  double t_end_;
  Evaluator eval_;
  double tol_;
  int dim_ = 0;
  std::vector<Sample> samples_;
};

/// Runs `first` and then `second` (second shifted so it starts where first ends).
/// Requires first(t_end) == second(t_begin).
SymplecticPath concatenate(const SymplecticPath& first, const SymplecticPath& second);

struct MaslovOptions {
  double signature_tol = 1e-8;
  /// Minimal smallest singular value of [B_M, B_Gamma(t)] (orthonormal bases).
  double transversality = 5e-3;
  int max_depth = 20;
  int candidates = 24;
  int grid = 9;
  std::uint64_t seed = 0x5eed;
};

/// Twice the Maslov index; always an integer.
int maslov_index_twice(const SymplecticPath& path, const MaslovOptions& options = {});

/// Maslov index. Throws NumericalError if the half-sum is odd, which happens
/// only when an endpoint meets the diagonal in an odd-dimensional subspace.
int maslov_index_path(const SymplecticPath& path, const MaslovOptions& options = {});

/// Path from the identity to S: polar decomposition S = Q P with Q orthogonal
/// symplectic (a unitary U in U(n)) and P symplectic positive definite, then
/// t -> U^t (principal branch) times P^t.
SymplecticPath symplectic_path_from_identity(const SymplecticMatrix& s, int samples = 17);

}  // namespace semitrace
