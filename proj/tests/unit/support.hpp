#pragma once

#include <random>
#include <span>
#include <vector>

#include "kinlyap/error.hpp"
#include "kinlyap/model.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap::testing {

inline CoplanarSteadyState paper_state() { return {1.0, {0.4, 0.3, 0.2, 0.6}}; }
inline CoplanarSteadyState uniform_state() { return {1.0, {0.25, 0.25, 0.25, 0.25}}; }

struct Coplanar {
  CoplanarSteadyState state;
  KineticModel model;
  std::vector<double> lambda0;
  StructuralDecomposition dec;

  explicit Coplanar(CoplanarSteadyState s = paper_state(), double sigma = 1.0)
      : state(s),
        model(coplanar_model(s, sigma)),
        lambda0(coplanar_lambda0(s)),
        dec(decompose(model, lambda0)) {}
};

inline void fill_uniform(std::span<double> v, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& x : v) x = u(rng);
}

}  // namespace kinlyap::testing

#define EXPECT_KINLYAP_ERROR(statement, expected_code)                         \
  do {                                                                         \
    try {                                                                      \
      statement;                                                               \
      ADD_FAILURE() << "expected " << ::kinlyap::to_string(expected_code);     \
    } catch (const ::kinlyap::Error& e_) {                                     \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                        \
    }                                                                          \
  } while (0)
