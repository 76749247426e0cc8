#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pvarlab {

/// Run body(i) for i in [0, count) across hardware threads. Work is split
/// into static stripes, so each index runs exactly once and callers that
/// write only to slot i get results independent of scheduling order.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    if (count == 0)
        return;
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    workers = std::min(workers, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < count; i += workers)
                    body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace pvarlab
