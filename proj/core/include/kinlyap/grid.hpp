#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinlyap/model.hpp"

namespace kinlyap {

// Uniform grid on (0,1)^d with N cells per direction. Grid points are
// x_j = j * dx for j = 0..N; the unknowns live on the interior points
// j in {1..N-1}^d.
class Grid {
 public:
  Grid(int dimension, int cells);

  int dimension() const noexcept { return d_; }
  int cells() const noexcept { return n_; }
  double spacing() const noexcept { return dx_; }
  // Points per direction in the interior, N - 1.
  int interior_extent() const noexcept { return n_ - 1; }

  std::size_t interior_count() const noexcept { return interior_count_; }
  // Points on one face lattice, (N-1)^(d-1).
  std::size_t face_count() const noexcept { return face_count_; }
  // Stride of axis i in the lexicographic interior layout (last axis fastest).
  std::size_t stride(int axis) const { return strides_[axis]; }

  double coordinate(int j) const noexcept { return j * dx_; }

  // Grid indices (1..N-1 each) of an interior flat index, and back.
  std::vector<int> interior_index(std::size_t flat) const;
  std::size_t interior_flat(std::span<const int> index) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.d_ == b.d_ && a.n_ == b.n_; }

 private:
  int d_;
  int n_;
  double dx_;
  std::size_t interior_count_;
  std::size_t face_count_;
  std::vector<std::size_t> strides_;
};

enum class PointKind { Interior, Face, EdgeOrCorner };

// Classifies a full grid index in {0..N}^d: interior, face (exactly one
// coordinate on {0, N}) or edge/corner (two or more).
PointKind classify_point(const Grid& grid, std::span<const int> index);

// Grid values f_{k,j} at one time step. Storage is component-major: all
// interior points of component 0 in lexicographic order (last axis fastest),
// then component 1, and so on.
class Field {
 public:
  Field(Grid grid, int components, double fill = 0.0);
  Field(Grid grid, int components, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return k_; }
  long step() const noexcept { return step_; }
  void set_step(long n) noexcept { step_ = n; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> component(int k) {
    return {values_.data() + k * grid_.interior_count(), grid_.interior_count()};
  }
  std::span<const double> component(int k) const {
    return {values_.data() + k * grid_.interior_count(), grid_.interior_count()};
  }
  double& at(int k, std::size_t flat) { return values_[k * grid_.interior_count() + flat]; }
  double at(int k, std::size_t flat) const { return values_[k * grid_.interior_count() + flat]; }

  bool is_finite() const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Grid grid_;
  int k_;
  std::vector<double> values_;
  long step_ = 0;
};

// sqrt( sum_j f_j^T f_j (dx)^d ), accumulated sequentially in storage order.
double l2_norm(const Field& field);

enum class Quadrature { Midpoint = 1, Simpson = 3 };

using InitialData = std::function<std::vector<double>(std::span<const double> x)>;

// Cell averages of f0 over the cells centered at the interior points.
// Midpoint evaluates f0 at the grid point; Simpson uses the 3^d product rule.
// Throws NonFiniteSample for non-finite values and DimensionMismatch if f0
// does not return K values.
Field sample_initial(const Grid& grid, int components, const InitialData& f0,
                     Quadrature quadrature = Quadrature::Midpoint);

// Snapshot CSV: header "k,j1,...,jd,value", one row per value in storage
// order, k counted from 1 and j as grid indices, values with 17 significant
// digits.
void write_snapshot_csv(std::ostream& out, const Field& field);
Field read_snapshot_csv(std::istream& in, const Grid& grid, int components);

// ---------------------------------------------------------------------------
// Boundary traces

enum class Side { Low, High };  // face x_i = 0, face x_i = 1

struct FaceBlock {
  int axis = 0;
  Side side = Side::Low;
  int component = 0;
  std::size_t offset = 0;  // into the stacked trace vector
};

// Which components are incoming and outgoing on each of the 2d faces, and
// how their face lattices are stacked: faces ordered x1=0, x1=1, ..., xd=1;
// components ascending inside a face; face lattice lexicographic over the
// remaining axes (last fastest).
//
// At face x_i = 0 the incoming components have lambda_{ki} > 0 and the
// outgoing ones lambda_{ki} < 0; at x_i = 1 the roles swap.
class BoundaryLayout {
 public:
  BoundaryLayout(const KineticModel& model, const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return k_; }
  bool coplanar() const noexcept { return coplanar_; }
  std::size_t face_count() const noexcept { return grid_.face_count(); }

  std::span<const FaceBlock> incoming() const noexcept { return incoming_; }
  std::span<const FaceBlock> outgoing() const noexcept { return outgoing_; }
  std::size_t incoming_size() const noexcept { return incoming_.size() * face_count(); }
  std::size_t outgoing_size() const noexcept { return outgoing_.size() * face_count(); }

  std::optional<std::size_t> find_incoming(int axis, Side side, int component) const;
  std::optional<std::size_t> find_outgoing(int axis, Side side, int component) const;

  // Interior flat index of the point adjacent to face (axis, side) at face
  // lattice position p (layer j_axis = 1 or N - 1).
  std::size_t adjacent_interior(int axis, Side side, std::size_t p) const;

  friend bool operator==(const BoundaryLayout&, const BoundaryLayout&);

 private:
  Grid grid_;
  int k_;
  bool coplanar_;
  std::vector<FaceBlock> incoming_;
  std::vector<FaceBlock> outgoing_;
};

enum class TraceKind { Incoming, Outgoing };

// Stacked per-face values for either the incoming or the outgoing blocks of
// a layout.
template <TraceKind Kind>
class Trace {
 public:
  explicit Trace(std::shared_ptr<const BoundaryLayout> layout)
      : layout_(std::move(layout)), values_(total_size(*layout_), 0.0) {}

  const BoundaryLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const BoundaryLayout>& layout_ptr() const noexcept { return layout_; }

  std::span<const FaceBlock> blocks() const noexcept {
    if constexpr (Kind == TraceKind::Incoming) return layout_->incoming();
    else return layout_->outgoing();
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> block(std::size_t b) {
    return {values_.data() + blocks()[b].offset, layout_->face_count()};
  }
  std::span<const double> block(std::size_t b) const {
    return {values_.data() + blocks()[b].offset, layout_->face_count()};
  }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

 private:
  static std::size_t total_size(const BoundaryLayout& l) {
    if constexpr (Kind == TraceKind::Incoming) return l.incoming_size();
    else return l.outgoing_size();
  }

  std::shared_ptr<const BoundaryLayout> layout_;
  std::vector<double> values_;
};

// Incoming boundary values supplied by a boundary law.
using FaceTrace = Trace<TraceKind::Incoming>;
// Outgoing values read from the interior layer adjacent to each face.
using OutgoingTrace = Trace<TraceKind::Outgoing>;

}  // namespace kinlyap
