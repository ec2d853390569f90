#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bergman {

// Exponent tuple of a monomial z^alpha. Entries may be negative when used to
// describe non-integrable monomials; the moment index set only holds
// nonnegative ones.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  int operator[](std::size_t j) const { return entries_[j]; }
  std::size_t size() const { return entries_.size(); }
  int degree() const { return degree_; }
  const std::vector<int>& entries() const { return entries_; }
  bool nonnegative() const;

  // alpha! as a double (exact for the small entries used here)
  double factorial() const;
  std::string str() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

// All alpha in N^n with |alpha| <= m, graded then lexicographic (larger
// leading entries first within a degree).
std::vector<MultiIndex> enumerate_multi_indices(int m, int n);

// Multi-indices of exact degree d, same ordering as above.
std::vector<MultiIndex> multi_indices_of_degree(int d, int n);

// The canonical index list I_m shared by every moment vector of a run.
class IndexSet {
 public:
  IndexSet(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t k) const { return indices_[k]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::optional<std::size_t> position(const MultiIndex& alpha) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  int m_;
  int n_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
};

double factorial(int k);
double binomial(int n, int k);

}  // namespace bergman
