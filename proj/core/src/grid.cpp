#include "kinlyap/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kinlyap/error.hpp"

namespace kinlyap {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Grid::Grid(int dimension, int cells) : d_(dimension), n_(cells) {
  if (d_ < 1) throw Error(ErrorCode::InvalidArgument, "grid dimension must be >= 1");
  if (n_ < 2) throw Error(ErrorCode::InvalidArgument, "grid needs N >= 2 cells");
  dx_ = 1.0 / n_;
  const auto extent = static_cast<std::size_t>(n_ - 1);
  interior_count_ = ipow(extent, d_);
  face_count_ = ipow(extent, d_ - 1);
  strides_.resize(d_);
  for (int i = 0; i < d_; ++i) strides_[i] = ipow(extent, d_ - 1 - i);
}

std::vector<int> Grid::interior_index(std::size_t flat) const {
  std::vector<int> idx(d_);
  for (int i = 0; i < d_; ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]) + 1;
    flat %= strides_[i];
  }
  return idx;
}

std::size_t Grid::interior_flat(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int i = 0; i < d_; ++i) flat += static_cast<std::size_t>(index[i] - 1) * strides_[i];
  return flat;
}

PointKind classify_point(const Grid& grid, std::span<const int> index) {
  int on_boundary = 0;
  for (int j : index) {
    if (j == 0 || j == grid.cells()) ++on_boundary;
  }
  if (on_boundary == 0) return PointKind::Interior;
  return on_boundary == 1 ? PointKind::Face : PointKind::EdgeOrCorner;
}

Field::Field(Grid grid, int components, double fill)
    : grid_(std::move(grid)), k_(components) {
  if (k_ < 1) throw Error(ErrorCode::InvalidArgument, "field needs at least one component");
  values_.assign(static_cast<std::size_t>(k_) * grid_.interior_count(), fill);
}

Field::Field(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), k_(components), values_(std::move(values)) {
  if (k_ < 1) throw Error(ErrorCode::InvalidArgument, "field needs at least one component");
  if (values_.size() != static_cast<std::size_t>(k_) * grid_.interior_count()) {
    throw Error(ErrorCode::DimensionMismatch, "field value count does not match grid");
  }
}

bool Field::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double l2_norm(const Field& field) {
  double sum = 0.0;
  for (double v : field.values()) sum += v * v;
  return std::sqrt(sum * std::pow(field.grid().spacing(), field.grid().dimension()));
}

Field sample_initial(const Grid& grid, int components, const InitialData& f0,
                     Quadrature quadrature) {
  const int d = grid.dimension();
  const double dx = grid.spacing();
  Field field(grid, components);

  // Quadrature nodes (offsets from the cell center) and weights, per axis.
  std::vector<double> nodes{0.0};
  std::vector<double> weights{1.0};
  if (quadrature == Quadrature::Simpson) {
    nodes = {-0.5 * dx, 0.0, 0.5 * dx};
    weights = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  }
  const std::size_t per_cell = ipow(nodes.size(), d);

  std::vector<double> x(d);
  std::vector<double> acc(components);
  for (std::size_t flat = 0; flat < grid.interior_count(); ++flat) {
    const auto idx = grid.interior_index(flat);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t q = 0; q < per_cell; ++q) {
      double w = 1.0;
      std::size_t rem = q;
      for (int i = d - 1; i >= 0; --i) {
        const std::size_t node = rem % nodes.size();
        rem /= nodes.size();
        x[i] = grid.coordinate(idx[i]) + nodes[node];
        w *= weights[node];
      }
      const std::vector<double> v = f0(x);
      if (v.size() != static_cast<std::size_t>(components)) {
        throw Error(ErrorCode::DimensionMismatch, "initial data returned wrong component count");
      }
      for (int k = 0; k < components; ++k) {
        if (!std::isfinite(v[k])) {
          throw Error(ErrorCode::NonFiniteSample, "initial data is not finite at a sample point");
        }
        acc[k] += w * v[k];
      }
    }
    for (int k = 0; k < components; ++k) field.at(k, flat) = acc[k];
  }
  return field;
}

void write_snapshot_csv(std::ostream& out, const Field& field) {
  const Grid& g = field.grid();
  out << "k";
  for (int i = 1; i <= g.dimension(); ++i) out << ",j" << i;
  out << ",value\n";
  for (int k = 0; k < field.components(); ++k) {
    for (std::size_t flat = 0; flat < g.interior_count(); ++flat) {
      out << (k + 1);
      for (int j : g.interior_index(flat)) out << ',' << j;
      out << ',' << format_double(field.at(k, flat)) << '\n';
    }
  }
}

Field read_snapshot_csv(std::istream& in, const Grid& grid, int components) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,", 0) != 0) {
    throw Error(ErrorCode::IoError, "snapshot CSV header missing");
  }
  Field field(grid, components);
  std::vector<bool> seen(field.values().size(), false);
  std::vector<int> idx(grid.dimension());
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<std::size_t>(grid.dimension()) + 2) {
      throw Error(ErrorCode::IoError, "snapshot row has wrong column count: " + line);
    }
    const int k = std::stoi(cells[0]) - 1;
    for (int i = 0; i < grid.dimension(); ++i) idx[i] = std::stoi(cells[i + 1]);
    if (k < 0 || k >= components) throw Error(ErrorCode::IoError, "component out of range");
    for (int j : idx) {
      if (j < 1 || j > grid.interior_extent()) throw Error(ErrorCode::IoError, "index out of range");
    }
    const std::string& vs = cells.back();
    double value = 0.0;
    const auto res = std::from_chars(vs.data(), vs.data() + vs.size(), value);
    if (res.ec != std::errc{}) throw Error(ErrorCode::IoError, "bad value: " + vs);
    const std::size_t flat = grid.interior_flat(idx);
    field.at(k, flat) = value;
    seen[k * grid.interior_count() + flat] = true;
    ++rows;
  }
  if (rows != seen.size() || std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::IoError, "snapshot does not cover every interior value exactly once");
  }
  return field;
}

BoundaryLayout::BoundaryLayout(const KineticModel& model, const Grid& grid)
    : grid_(grid), k_(model.components()), coplanar_(is_coplanar(model)) {
  if (model.dimension() != grid.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "model and grid dimensions differ");
  }
  const std::size_t face = grid.face_count();
  std::size_t in_off = 0, out_off = 0;
  for (int axis = 0; axis < grid.dimension(); ++axis) {
    for (Side side : {Side::Low, Side::High}) {
      for (int k = 0; k < k_; ++k) {
        const double v = model.velocity(k, axis);
        if (v == 0.0) continue;
        const bool incoming = (side == Side::Low) ? v > 0.0 : v < 0.0;
        if (incoming) {
          incoming_.push_back({axis, side, k, in_off});
          in_off += face;
        } else {
          outgoing_.push_back({axis, side, k, out_off});
          out_off += face;
        }
      }
    }
  }
}

namespace {

std::optional<std::size_t> find_block(std::span<const FaceBlock> blocks, int axis, Side side,
                                      int component) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].axis == axis && blocks[b].side == side && blocks[b].component == component) {
      return b;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> BoundaryLayout::find_incoming(int axis, Side side, int component) const {
  return find_block(incoming_, axis, side, component);
}

std::optional<std::size_t> BoundaryLayout::find_outgoing(int axis, Side side, int component) const {
  return find_block(outgoing_, axis, side, component);
}

std::size_t BoundaryLayout::adjacent_interior(int axis, Side side, std::size_t p) const {
  // Face lattice = (outer, inner) split around the face axis.
  const std::size_t inner = grid_.stride(axis);
  const std::size_t outer = p / inner;
  const std::size_t in = p % inner;
  const std::size_t layer =
      side == Side::Low ? 0 : static_cast<std::size_t>(grid_.interior_extent() - 1);
  return outer * inner * static_cast<std::size_t>(grid_.interior_extent()) + layer * inner + in;
}

bool operator==(const BoundaryLayout& a, const BoundaryLayout& b) {
  auto same = [](std::span<const FaceBlock> x, std::span<const FaceBlock> y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].axis != y[i].axis || x[i].side != y[i].side ||
          x[i].component != y[i].component || x[i].offset != y[i].offset)
        return false;
    }
    return true;
  };
  return a.grid_ == b.grid_ && a.k_ == b.k_ && same(a.incoming_, b.incoming_) &&
         same(a.outgoing_, b.outgoing_);
}

}  // namespace kinlyap
