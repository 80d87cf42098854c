#include "mergeplan/mcts/reward.hpp"

#include <sstream>

#include "mergeplan/util/keyvalue.hpp"

namespace mergeplan::mcts {

RewardVector::RewardVector(std::size_t dims, double fill) : size_(dims) {
  if (dims > kMaxRewardDims) throw DimensionMismatch("reward vector too long");
  for (std::size_t i = 0; i < dims; ++i) v_[i] = fill;
}

RewardVector::RewardVector(std::initializer_list<double> values) : size_(values.size()) {
  if (values.size() > kMaxRewardDims) throw DimensionMismatch("reward vector too long");
  std::size_t i = 0;
  for (double x : values) v_[i++] = x;
}

RewardVector& RewardVector::operator+=(const RewardVector& o) {
  if (o.size_ != size_) throw DimensionMismatch("reward dimensions differ");
  for (std::size_t i = 0; i < size_; ++i) v_[i] += o.v_[i];
  return *this;
}

RewardVector& RewardVector::operator*=(double k) {
  for (std::size_t i = 0; i < size_; ++i) v_[i] *= k;
  return *this;
}

bool operator==(const RewardVector& a, const RewardVector& b) {
  if (a.size_ != b.size_) return false;
  for (std::size_t i = 0; i < a.size_; ++i) {
    if (a.v_[i] != b.v_[i]) return false;
  }
  return true;
}

std::string RewardVector::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < size_; ++i) {
    if (i > 0) out += ", ";
    out += util::format_double(v_[i]);
  }
  return out + ")";
}

namespace {

void check_dims(const RewardVector& r, const RewardVector& rp, const RewardVector& tau) {
  if (r.size() != rp.size() || r.size() != tau.size() || r.size() == 0) {
    throw DimensionMismatch("tlo comparison needs equal, non-zero dimensions");
  }
}

bool settled(double a, double b, double t) { return (a > t && b > t) || a == b; }

}  // namespace

bool tlo_leq(const RewardVector& r, const RewardVector& rp, const RewardVector& tau) {
  check_dims(r, rp, tau);
  const std::size_t last = r.size() - 1;
  for (std::size_t j = 0; j < last; ++j) {
    if (!settled(r[j], rp[j], tau[j])) return r[j] <= rp[j];
  }
  return r[last] <= rp[last];
}

bool tlo_leq_quoted(const RewardVector& r, const RewardVector& rp, const RewardVector& tau) {
  check_dims(r, rp, tau);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= rp[i]) return true;
    if (!settled(r[i], rp[i], tau[i])) return false;
  }
  return false;
}

Ordering tlo_compare(const RewardVector& r, const RewardVector& rp, const RewardVector& tau) {
  const bool le = tlo_leq(r, rp, tau);
  const bool ge = tlo_leq(rp, r, tau);
  if (le && ge) return Ordering::kEquivalent;
  return le ? Ordering::kLess : Ordering::kGreater;
}

}  // namespace mergeplan::mcts
