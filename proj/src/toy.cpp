#include "sknn/toy.hpp"

namespace sknn::toy {

namespace {

const char* const kMatrix[10][10] = {
    {"8.5", "3.2", "4.3", "1.8", "2.1", "3.5", "5.9", "8.6", "7.2", "1.3"},
    {"1.6", "4.7", "3.1", "2.9", "6.3", "9.1", "3.8", "4.1", "2.3", "2.9"},
    {"2.1", "7.2", "8.5", "1.9", "2.5", "8.9", "9.1", "5.1", "7.1", "9.8"},
    {"2.3", "4.9", "1.1", "5.6", "4.2", "1.8", "2.6", "5.5", "2.7", "7.3"},
    {"5.1", "3.4", "7.2", "3.7", "8.3", "1.5", "6.9", "7.5", "9.2", "6.6"},
    {"9.5", "3.5", "1.1", "8.3", "6.3", "1.8", "2.9", "6.1", "5.6", "7.8"},
    {"7.9", "9.4", "7.8", "5.6", "3.2", "4.8", "2.3", "3.8", "3.2", "9.4"},
    {"5.7", "6.4", "6.9", "2.8", "7.9", "9.6", "4.6", "5.1", "1.4", "8.3"},
    {"1.8", "5.8", "1.4", "4.1", "3.8", "4.7", "7.1", "4.4", "3.8", "5.9"},
    {"8.4", "3.4", "7.3", "2.9", "5.5", "6.7", "6.1", "6.7", "7.2", "3.3"},
};

}  // namespace

proposed::SecurityParams params() {
  proposed::SecurityParams p;
  p.d = 2;
  p.c = 2;
  p.epsilon = 4;
  p.data_scale = 1;
  p.matrix_scale = 10;
  p.query_scale = 100;
  return p;
}

proposed::OwnerKey owner_key() {
  Matrix m(10, 10);
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 10; ++c) m(r, c) = parse_rational(kMatrix[r][c]);
  }
  // sigma_j - 1 is the largest coordinate each axis may hold
  return proposed::OwnerKey::assemble(params(), std::move(m), Permutation({5, 2, 7, 1, 8, 4, 3, 6, 0, 9}),
                                      Vector{15, 63, 17}, IntVector{8, 11}, {1, 1, 1, 0, 1, 0},
                                      IntVector{19, 23, 11, 18, 25, 40}, IntVector{7, 10});
}

std::vector<IntVector> database() { return {IntVector{6, 7}, IntVector{4, 5}}; }

IntVector query() { return IntVector{3, 9}; }

ReplaySource source(std::uint64_t seed) {
  ReplaySource::Script s;
  s.tau_free = {3, 3};
  s.alpha_offsets = {7, 4, 2, 3};
  s.beta1_units = {400};
  s.beta2_units = {4400};
  s.shuffles = {{0, 1}};
  s.slot_units = {2100, 200, 600};
  return ReplaySource(std::move(s), seed);
}

Expected expected() {
  Expected e;
  e.nom_p = Rational(-169, 4);
  e.nom_q = 14404;
  e.p_prime = {
      {"-2.450", "4.596", "-20.674", "-4.666", "1.680", "-14.833", "16.390", "-10.106", "30.685", "11.411"},
      {"-21.880", "-19.894", "-24.697", "15.103", "-9.657", "-24.043", "4.931", "-7.558", "44.538", "54.709"},
  };
  e.q_prime = {1575584, 1782952, 1228800, 2905368, 3427432, 4446252, 2539928, 1537316, 2340052, 2188120};
  e.scores = {"28048002.560", "28424001.890"};
  e.nearest = 0;
  return e;
}

}  // namespace sknn::toy
