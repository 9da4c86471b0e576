#include "entrans/parallel.hpp"

#include <atomic>

namespace entrans {

namespace {
std::atomic<int> gThreads{1};
}

void setThreadCount(int n) { gThreads.store(std::max(1, n)); }
int threadCount() { return gThreads.load(); }

}  // namespace entrans
