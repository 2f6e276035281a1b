#include "pfs/modes.hpp"

#include <map>
#include <stdexcept>

namespace pfs {

ModeBall::ModeBall(int dim, int radius) : dim_(dim), k_(radius) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("ModeBall: dim must be 1..3");
  if (radius < 0) throw std::invalid_argument("ModeBall: radius must be >= 0");
  const int k2 = radius * radius;
  const int lo1 = -radius, hi1 = radius;
  const int lo2 = dim >= 2 ? -radius : 0, hi2 = dim >= 2 ? radius : 0;
  const int lo3 = dim >= 3 ? -radius : 0, hi3 = dim >= 3 ? radius : 0;
  for (int a = lo1; a <= hi1; ++a)
    for (int b = lo2; b <= hi2; ++b)
      for (int c = lo3; c <= hi3; ++c) {
        const int nsq = a * a + b * b + c * c;
        if (nsq > k2) continue;
        modes_.push_back({a, b, c});
        n_sq_.push_back(nsq);
        omega_.push_back(std::sqrt(static_cast<double>(nsq) + 1.0));
      }
  const int span = 2 * radius + 1;
  int table = span;
  for (int i = 1; i < dim; ++i) table *= span;
  lookup_.assign(table, -1);
  for (int i = 0; i < size(); ++i) lookup_[key(modes_[i])] = i;
  reflect_.resize(size());
  for (int i = 0; i < size(); ++i) {
    Mode neg = {-modes_[i][0], -modes_[i][1], -modes_[i][2]};
    reflect_[i] = lookup_[key(neg)];
  }
}

int ModeBall::key(const Mode& n) const {
  const int span = 2 * k_ + 1;
  int v = n[0] + k_;
  for (int i = 1; i < dim_; ++i) v = v * span + (n[i] + k_);
  return v;
}

int ModeBall::index_of(const Mode& n) const {
  for (int i = 0; i < dim_; ++i)
    if (n[i] < -k_ || n[i] > k_) return -1;
  for (int i = dim_; i < 3; ++i)
    if (n[i] != 0) return -1;
  const int idx = lookup_[key(n)];
  return idx;
}

int ModeBall::index_of(std::span<const int> n) const {
  Mode m = {0, 0, 0};
  for (std::size_t i = 0; i < n.size() && i < 3; ++i) m[i] = n[i];
  return index_of(m);
}

const ModeBall& mode_ball(int dim, int radius) {
  static std::map<std::pair<int, int>, ModeBall> cache;
  auto it = cache.find({dim, radius});
  if (it == cache.end())
    it = cache.emplace(std::make_pair(dim, radius), ModeBall(dim, radius)).first;
  return it->second;
}

}  // namespace pfs
