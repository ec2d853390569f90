#include "bergman/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace bergman {

MultiIndex::MultiIndex(std::vector<int> entries)
    : entries_(std::move(entries)),
      degree_(std::accumulate(entries_.begin(), entries_.end(), 0)) {
  if (entries_.empty()) throw std::invalid_argument("multi-index needs n >= 1");
}

bool MultiIndex::nonnegative() const {
  for (int e : entries_)
    if (e < 0) return false;
  return true;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : entries_) f *= bergman::factorial(e);
  return f;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(entries_[j]);
  }
  return s + ")";
}

namespace {

void fill_degree(int remaining, std::size_t pos, std::vector<int>& cur,
                 std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    fill_degree(remaining - e, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_degree(int d, int n) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (d < 0) throw std::invalid_argument("degree must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  fill_degree(d, 0, cur, out);
  return out;
}

std::vector<MultiIndex> enumerate_multi_indices(int m, int n) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (m < 0) throw std::invalid_argument("degree bound m must be >= 0");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= m; ++d) {
    auto layer = multi_indices_of_degree(d, n);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

IndexSet::IndexSet(int m, int n) : m_(m), n_(n), indices_(enumerate_multi_indices(m, n)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) lookup_.emplace(indices_[k], k);
}

std::optional<std::size_t> IndexSet::position(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

double factorial(int k) {
  if (k < 0) throw std::invalid_argument("factorial of a negative integer");
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace bergman
