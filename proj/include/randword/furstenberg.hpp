#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "randword/floquet.hpp"
#include "randword/matrix2.hpp"
#include "randword/parallel.hpp"
#include "randword/scattering.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// Word matrices M(w, E) over the support of a model at one real energy.
struct GeneratorSet {
  double energy = 0.0;
  std::vector<RealMatrix2> matrices;

  static GeneratorSet from_model(const WordModel& model, double energy);
};

struct CompactnessReport {
  bool noncompact = false;
  /// Decided by the random-product probe rather than an exact criterion.
  bool heuristic = false;
  std::string certificate;
};

/// Non-compactness of the closed group generated by gens.
CompactnessReport check_noncompact(const GeneratorSet& gens);

struct IrreducibilityReport {
  bool strongly_irreducible = false;
  /// Projective directions (angles in [0, pi)) of an invariant finite set.
  std::vector<double> witness;
  /// More than two distinct generators: the size-2 search is not exhaustive.
  bool heuristic = false;
};

/// Searches for invariant sets of one or two directions among the real
/// eigendirections of the generators and of their pairwise products.
IrreducibilityReport check_strong_irreducibility(const GeneratorSet& gens);

/// Image of the direction at angle theta under g, as an angle in [0, pi).
double act_on_direction(const RealMatrix2& g, double theta);
/// Distance between two directions modulo pi.
double direction_distance(double a, double b);

struct ConjugatedPair {
  double energy = 0.0;
  double omega = 0.0;  // rho_+ = exp(i omega)
  cplx a, b;
  RealMatrix2 g0_tilde;
  RealMatrix2 s;
};

/// Rotation by omega and the scattering matrix s built from a +- b.
/// Throws BranchPointError within `edge_tolerance` of a band edge.
ConjugatedPair conjugated_pair(const InsertionProblem& problem, double energy,
                               double edge_tolerance = 1e-6);

enum class ExceptionalClass { BandEdge, DRoot, BRoot, GapRoot, CommutingElliptic };
std::string to_string(ExceptionalClass c);

struct ExceptionalEntry {
  double energy = 0.0;
  ExceptionalClass kind = ExceptionalClass::BandEdge;
  double residual = 0.0;
  bool heuristic = false;
};

struct ExceptionalSet {
  /// Sorted by energy, no two within 1e-8.
  std::vector<ExceptionalEntry> entries;

  std::vector<double> energies() const;
  double distance(double energy) const;
};

struct ExceptionalOptions {
  /// Energy window; defaults to [-2 - K, 2 + K] with K the model bound.
  std::optional<double> lower;
  std::optional<double> upper;
  std::size_t scan_points = 2001;
  /// Accepted commutator norm at a refined commuting-elliptic energy.
  double commutator_accept = 1e-8;
  RootScanOptions roots;
  Execution exec = Execution::Parallel;
};

/// Candidate exceptional set for the background built from w0 with w1
/// inserted, plus energies where the full generator set of `model` fails a
/// group criterion. Throws ModelDegenerateError when w0 and w1 commute.
ExceptionalSet exceptional_set(const WordModel& model, const Word& w0, const Word& w1,
                               const ExceptionalOptions& options = {});

/// Max commutator norm over generator pairs when every generator is
/// elliptic or +-I, infinity otherwise. Vanishes where the group is a
/// compact rotation group (up to centre).
double commuting_elliptic_indicator(const GeneratorSet& gens);

}  // namespace randword
