#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "kinlyap/grid.hpp"
#include "kinlyap/model.hpp"

namespace kinlyap {

// Copies the interior values adjacent to every face into an outgoing trace:
// at face x_i = 1 a component with lambda_{ki} > 0 is read at j_i = N - 1, at
// face x_i = 0 a component with lambda_{ki} < 0 is read at j_i = 1.
void extract_outgoing(const Field& field, OutgoingTrace& out);
OutgoingTrace extract_outgoing(const Field& field, std::shared_ptr<const BoundaryLayout> layout);

// Maps outgoing numerical traces to incoming boundary values. Implementations
// are immutable; apply is a pure function of its inputs. The step counter is
// passed for time-dependent laws; none of the shipped laws uses it.
class BoundaryLaw {
 public:
  virtual ~BoundaryLaw() = default;

  virtual void apply(const OutgoingTrace& trace, long step, FaceTrace& out) const = 0;
  virtual std::string name() const = 0;

  FaceTrace apply(const OutgoingTrace& trace, long step) const;
};

// Every incoming value is zero.
class TrivialLaw final : public BoundaryLaw {
 public:
  using BoundaryLaw::apply;
  void apply(const OutgoingTrace& trace, long step, FaceTrace& out) const override;
  std::string name() const override { return "trivial"; }
};

// Coplanar model: zero on the left, right and top faces; the bottom face
// receives f3(j1, 0) = k f2(1, j1), i.e. it is fed by the left-face outgoing
// trace. Throws NotCoplanar on any other layout.
class CoplanarGain45Law final : public BoundaryLaw {
 public:
  explicit CoplanarGain45Law(double k) : k_(k) {}
  using BoundaryLaw::apply;
  void apply(const OutgoingTrace& trace, long step, FaceTrace& out) const override;
  std::string name() const override { return "gain45"; }
  double gain() const noexcept { return k_; }

 private:
  double k_;
};

// Coplanar model: as CoplanarGain45Law but the bottom face receives
// f3(j1, 0) = k1 f2(1, j1) + k2 f4(j1, 1).
class CoplanarGain46Law final : public BoundaryLaw {
 public:
  CoplanarGain46Law(double k1, double k2) : k1_(k1), k2_(k2) {}
  using BoundaryLaw::apply;
  void apply(const OutgoingTrace& trace, long step, FaceTrace& out) const override;
  std::string name() const override { return "gain46"; }
  double k1() const noexcept { return k1_; }
  double k2() const noexcept { return k2_; }

 private:
  double k1_;
  double k2_;
};

struct SparseEntry {
  std::size_t row = 0;  // index into the stacked incoming trace
  std::size_t col = 0;  // index into the stacked outgoing trace
  double value = 0.0;
};

// incoming = A * outgoing for a sparse A given as triplets over the stacked
// trace vectors (see BoundaryLayout for the stacking order). Duplicate
// entries are summed. Throws DimensionMismatch when an index does not fit the
// layout it is applied to.
class GeneralLinearLaw final : public BoundaryLaw {
 public:
  explicit GeneralLinearLaw(std::vector<SparseEntry> entries);
  using BoundaryLaw::apply;
  void apply(const OutgoingTrace& trace, long step, FaceTrace& out) const override;
  std::string name() const override { return "linear"; }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

 private:
  std::vector<SparseEntry> entries_;  // sorted by (row, col)
};

// Triplet CSV "row,col,value" (0-based indices; an optional header line).
std::vector<SparseEntry> read_sparse_triplets(std::istream& in);

// Delta-x uniform sufficient gain bounds for B <= 0 in the coplanar model.
double admissible_gain_45(double alpha, const CoplanarSteadyState& state);

struct Gain46Bounds {
  double k1max = 0.0;
  double k2max = 0.0;
};
Gain46Bounds admissible_gains_46(double alpha, const CoplanarSteadyState& state);

}  // namespace kinlyap
