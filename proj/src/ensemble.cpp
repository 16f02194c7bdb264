#include "kpzlab/ensemble.hpp"

#include <cstdlib>

#include "kpzlab/stats.hpp"

namespace kpzlab {

int worker_count() {
  if (const char* env = std::getenv("KPZLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

MeanCurve aggregate(const std::vector<PathRecord>& recs, const std::string& name) {
  if (recs.empty()) throw std::invalid_argument("aggregate: no records");
  MeanCurve mc;
  mc.t = recs.front().t;
  const std::size_t m = mc.t.size();
  std::vector<double> col(recs.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < recs.size(); ++i) col[i] = recs[i][name].at(j);
    mc.mean.push_back(mean(col));
    mc.stderr_.push_back(col.size() > 1 ? standard_error(col) : 0.0);
  }
  return mc;
}

}  // namespace kpzlab
