#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace kpzlab {

// Time-stamped scalar observables of one sample.
struct PathRecord {
  std::vector<double> t;
  std::map<std::string, std::vector<double>> series;

  void stamp(double time) { t.push_back(time); }
  void put(const std::string& name, double v) { series[name].push_back(v); }
  const std::vector<double>& operator[](const std::string& name) const { return series.at(name); }

  bool aligned() const {
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1])) return false;
    for (auto& [k, v] : series)
      if (v.size() != t.size()) return false;
    return true;
  }
};

struct SampleError : std::runtime_error {
  long index;
  SampleError(long i, const std::string& what)
      : std::runtime_error("sample " + std::to_string(i) + ": " + what), index(i) {}
};

int worker_count();

// Runs fn(i) for i in [0, n) on a thread pool; results are stored by index so
// any reduction over them is schedule independent.
template <typename R>
std::vector<R> parallel_map(long n, const std::function<R(long)>& fn, int threads = 0) {
  std::vector<R> out(static_cast<std::size_t>(n));
  if (threads <= 0) threads = worker_count();
  threads = static_cast<int>(std::min<long>(threads, std::max<long>(n, 1)));
  std::atomic<long> next{0};
  std::exception_ptr err;
  long err_index = -1;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err || i < err_index) {
          err = std::current_exception();
          err_index = i;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) {
    try {
      std::rethrow_exception(err);
    } catch (const std::exception& e) {
      throw SampleError(err_index, e.what());
    }
  }
  return out;
}

struct MeanCurve {
  std::vector<double> t, mean, stderr_;
};

// per-stamp ensemble mean and standard error, folded in index order
MeanCurve aggregate(const std::vector<PathRecord>& recs, const std::string& name);

}  // namespace kpzlab
