#include "kinlyap/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "kinlyap/error.hpp"

namespace kinlyap {

void extract_outgoing(const Field& field, OutgoingTrace& out) {
  const BoundaryLayout& layout = out.layout();
  if (!(field.grid() == layout.grid()) || field.components() != layout.components()) {
    throw Error(ErrorCode::DimensionMismatch, "field does not match the trace layout");
  }
  const auto blocks = out.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const FaceBlock& fb = blocks[b];
    const auto src = field.component(fb.component);
    auto dst = out.block(b);
    for (std::size_t p = 0; p < dst.size(); ++p) {
      dst[p] = src[layout.adjacent_interior(fb.axis, fb.side, p)];
    }
  }
}

OutgoingTrace extract_outgoing(const Field& field, std::shared_ptr<const BoundaryLayout> layout) {
  OutgoingTrace out(std::move(layout));
  extract_outgoing(field, out);
  return out;
}

FaceTrace BoundaryLaw::apply(const OutgoingTrace& trace, long step) const {
  FaceTrace out(trace.layout_ptr());
  apply(trace, step, out);
  return out;
}

namespace {

void check_same_layout(const OutgoingTrace& trace, const FaceTrace& out) {
  if (trace.layout_ptr() != out.layout_ptr() && !(trace.layout() == out.layout())) {
    throw Error(ErrorCode::DimensionMismatch, "incoming and outgoing traces use different layouts");
  }
}

struct CoplanarBlocks {
  std::size_t bottom_in;     // f3 on x2 = 0
  std::size_t left_out_f2;   // f2 on x1 = 0
  std::size_t bottom_out_f4; // f4 on x2 = 0
};

CoplanarBlocks coplanar_blocks(const BoundaryLayout& layout) {
  if (!layout.coplanar()) {
    throw Error(ErrorCode::NotCoplanar, "gain laws need the coplanar four-velocity model");
  }
  return {*layout.find_incoming(1, Side::Low, 2), *layout.find_outgoing(0, Side::Low, 1),
          *layout.find_outgoing(1, Side::Low, 3)};
}

}  // namespace

void TrivialLaw::apply(const OutgoingTrace& trace, long, FaceTrace& out) const {
  check_same_layout(trace, out);
  out.fill(0.0);
}

// In 2-D each face lattice is indexed by the single remaining grid index, so
// position p on the bottom face is j1 = p + 1 and position p on the left face
// is j2 = p + 1.
void CoplanarGain45Law::apply(const OutgoingTrace& trace, long, FaceTrace& out) const {
  check_same_layout(trace, out);
  const CoplanarBlocks b = coplanar_blocks(trace.layout());
  out.fill(0.0);
  auto bottom = out.block(b.bottom_in);
  const auto left = trace.block(b.left_out_f2);
  for (std::size_t p = 0; p < bottom.size(); ++p) bottom[p] = k_ * left[p];
}

void CoplanarGain46Law::apply(const OutgoingTrace& trace, long, FaceTrace& out) const {
  check_same_layout(trace, out);
  const CoplanarBlocks b = coplanar_blocks(trace.layout());
  out.fill(0.0);
  auto bottom = out.block(b.bottom_in);
  const auto left = trace.block(b.left_out_f2);
  const auto bottom_out = trace.block(b.bottom_out_f4);
  for (std::size_t p = 0; p < bottom.size(); ++p) {
    bottom[p] = k1_ * left[p] + k2_ * bottom_out[p];
  }
}

GeneralLinearLaw::GeneralLinearLaw(std::vector<SparseEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!std::isfinite(e.value)) {
      throw Error(ErrorCode::InvalidArgument, "linear law entries must be finite");
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

void GeneralLinearLaw::apply(const OutgoingTrace& trace, long, FaceTrace& out) const {
  check_same_layout(trace, out);
  const auto in = trace.values();
  auto dst = out.values();
  for (const auto& e : entries_) {
    if (e.row >= dst.size() || e.col >= in.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "linear law entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                      ") outside a " + std::to_string(dst.size()) + "x" +
                      std::to_string(in.size()) + " map");
    }
  }
  std::fill(dst.begin(), dst.end(), 0.0);
  for (const auto& e : entries_) dst[e.row] += e.value * in[e.col];
}

std::vector<SparseEntry> read_sparse_triplets(std::istream& in) {
  std::vector<SparseEntry> entries;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first && line.find_first_of("0123456789") != 0) {
      first = false;  // header
      continue;
    }
    first = false;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw Error(ErrorCode::IoError, "bad triplet row: " + line);
    }
    try {
      entries.push_back({std::stoul(a), std::stoul(b), std::stod(c)});
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoError, "bad triplet row: " + line);
    }
  }
  return entries;
}

double admissible_gain_45(double alpha, const CoplanarSteadyState& state) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  const auto& f = state.density;
  return std::sqrt((alpha / f[1] + 1.0) / (alpha / f[2] + 1.0));
}

Gain46Bounds admissible_gains_46(double alpha, const CoplanarSteadyState& state) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  const auto& f = state.density;
  const double denom = 2.0 * (alpha / f[2] + 1.0);
  return {std::sqrt((alpha / f[1] + 1.0) / denom), std::sqrt((alpha / f[3] + 1.0) / denom)};
}

}  // namespace kinlyap
