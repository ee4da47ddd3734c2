#pragma once

#include <functional>

namespace tyurin {

// Worker cap: TYURIN_LAB_THREADS if set, else the hardware concurrency.
int max_threads();

// Runs f(0) .. f(count - 1) on up to max_threads() threads; rethrows the
// first exception by index.
void parallel_for(int count, const std::function<void(int)>& f);

}  // namespace tyurin
