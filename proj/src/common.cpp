#include "ncym/common.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

namespace ncym {

namespace {

std::mutex g_warn_mutex;
std::function<void(const std::string&)> g_warn_handler;
std::atomic<int> g_threads{1};

template <class T>
T pairwise(const T* x, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(x, half) + pairwise(x + half, n - half);
}

}  // namespace

const char* error_code_name(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_rank: return "invalid-rank";
    case ErrorCode::unsupported_rep: return "unsupported-rep";
    case ErrorCode::shape: return "shape";
    case ErrorCode::axis_out_of_range: return "axis-out-of-range";
    case ErrorCode::missing_chart: return "missing-chart";
    case ErrorCode::unsupported_dim: return "unsupported-dim";
    case ErrorCode::singular_metric: return "singular-metric";
    case ErrorCode::singular_fiber_metric: return "singular-fiber-metric";
    case ErrorCode::not_spd: return "not-spd";
    case ErrorCode::non_unitary: return "non-unitary";
    case ErrorCode::reference_mismatch: return "reference-mismatch";
    case ErrorCode::classification_refused: return "classification-refused";
    case ErrorCode::degree: return "degree";
    case ErrorCode::validation: return "validation";
    case ErrorCode::io: return "io";
    case ErrorCode::missing_artifact: return "missing-artifact";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_warn_handler) {
    g_warn_handler(msg);
  } else {
    std::cerr << "ncym: warning: " << msg << '\n';
  }
}

void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_warn_handler = std::move(handler);
}

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const auto nt = static_cast<std::size_t>(std::min<int>(g_threads, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (nt <= 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double pairwise_sum(const double* x, std::size_t n) { return pairwise(x, n); }
cplx pairwise_sum(const cplx* x, std::size_t n) { return pairwise(x, n); }

}  // namespace ncym
