#ifndef PFS_MODES_HPP
#define PFS_MODES_HPP

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace pfs {

/// Space mode n in Z^d, d <= 3; unused trailing entries are zero.
using Mode = std::array<int, 3>;

/// Enumeration of the Euclidean mode ball { n in Z^d : |n|_2 <= k },
/// in lexicographic order, with O(1) index lookup and the index of -n.
/// Every truncated spectrum in the library is laid out against one of these.
class ModeBall {
 public:
  ModeBall(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return k_; }
  int size() const { return static_cast<int>(modes_.size()); }

  const Mode& mode(int i) const { return modes_[i]; }
  int n_squared(int i) const { return n_sq_[i]; }
  /// sqrt(n^2 + 1), the eigenvalue of B on mode i.
  double omega(int i) const { return omega_[i]; }
  /// Index of -n for mode i.
  int reflect(int i) const { return reflect_[i]; }
  /// Index of n, or -1 when |n| > k.
  int index_of(const Mode& n) const;
  int index_of(std::span<const int> n) const;

 private:
  int key(const Mode& n) const;
  int dim_;
  int k_;
  std::vector<Mode> modes_;
  std::vector<int> n_sq_;
  std::vector<double> omega_;
  std::vector<int> reflect_;
  std::vector<int> lookup_;  // dense (2k+1)^d table, -1 = outside ball
};

/// Shared cached instance for (dim, radius).
const ModeBall& mode_ball(int dim, int radius);

inline double dot_mode(const Mode& n, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += n[i] * x[i];
  return s;
}

}  // namespace pfs

#endif
