#pragma once

// Fixed-capacity reward vectors and the thresholded lexicographic order.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace mergeplan::mcts {

inline constexpr std::size_t kMaxRewardDims = 8;

class RewardVector {
 public:
  RewardVector() = default;
  explicit RewardVector(std::size_t dims, double fill = 0.0);
  RewardVector(std::initializer_list<double> values);

  std::size_t size() const { return size_; }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  const double* begin() const { return v_.data(); }
  const double* end() const { return v_.data() + size_; }

  RewardVector& operator+=(const RewardVector& o);
  RewardVector& operator*=(double k);
  friend RewardVector operator+(RewardVector a, const RewardVector& b) { return a += b; }
  friend RewardVector operator*(RewardVector a, double k) { return a *= k; }
  friend bool operator==(const RewardVector& a, const RewardVector& b);

  std::string to_string() const;

 private:
  std::array<double, kMaxRewardDims> v_{};
  std::size_t size_ = 0;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// r ⪯ r' (r' is at least as good as r). Index 0 has the highest priority.
// Level j is settled when r_j = r'_j or both exceed τ_j; the first unsettled
// level among all but the last decides, otherwise the last level decides
// without a threshold. With τ = +inf this is the plain lexicographic order.
bool tlo_leq(const RewardVector& r, const RewardVector& rp, const RewardVector& tau);

// The predicate exactly as usually quoted:
//   ∃i: r_i <= r'_i ∧ ∀j<i: (r_j > τ_j ∧ r'_j > τ_j) ∨ r_j = r'_j.
// Kept for comparison; it holds whenever tlo_leq does, but it also holds on
// r_0 <= r'_0 alone, so it cannot separate vectors that tie on level 0.
bool tlo_leq_quoted(const RewardVector& r, const RewardVector& rp, const RewardVector& tau);

// a is strictly better than b: b ⪯ a and not a ⪯ b.
inline bool tlo_better(const RewardVector& a, const RewardVector& b, const RewardVector& tau) {
  return tlo_leq(b, a, tau) && !tlo_leq(a, b, tau);
}

enum class Ordering { kLess, kEquivalent, kGreater };

// kLess: r ≺ r'; kGreater: r' ≺ r.
Ordering tlo_compare(const RewardVector& r, const RewardVector& rp, const RewardVector& tau);

}  // namespace mergeplan::mcts
