#include "gemd/matrix.hpp"

#include <charconv>
#include <fstream>

namespace gemd {

std::size_t ProximityMatrix::nonzero_count() const {
  std::size_t count = 0;
  for_each_nonzero([&count](Eigen::Index, Eigen::Index, double) { ++count; });
  return count;
}

Eigen::VectorXd ProximityMatrix::row_sums() const {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(rows());
  for_each_nonzero([&sums](Eigen::Index i, Eigen::Index, double v) { sums(i) += v; });
  return sums;
}

void ProximityMatrix::dump_triples(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[32];
  for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out << i << '\t' << j << '\t' << std::string_view(buf, ptr - buf) << '\n';
  });
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gemd
