// SPDX-License-Identifier: Apache-2.0
//
// rismcrb - localization bounds under RIS amplitude-model mismatch
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISMCRB_EXPERIMENTS_PARALLEL_HPP
#define RISMCRB_EXPERIMENTS_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rismcrb::experiments
{
    // Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must
    // write only to their own output slot; results then do not depend on the
    // schedule. The exception from the lowest failing index is rethrown.
    class ParallelFor
    {
    public:
        explicit ParallelFor(int threads = 1) : threads_(threads < 1 ? 1 : threads) {}

        int threads() const noexcept { return threads_; }

        template <class Fn>
        void operator()(int n, Fn &&fn) const
        {
            if (n <= 0)
                return;
            const int workers = std::min(threads_, n);
            if (workers == 1)
            {
                for (int i = 0; i < n; ++i)
                    fn(i);
                return;
            }
            std::atomic<int> next{0};
            std::mutex mu;
            int failed_at = n;
            std::exception_ptr error;
            auto work = [&]()
            {
                for (int i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (i < failed_at)
                        {
                            failed_at = i;
                            error = std::current_exception();
                        }
                    }
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers - 1));
            for (int w = 1; w < workers; ++w)
                pool.emplace_back(work);
            work();
            for (auto &t : pool)
                t.join();
            if (error)
                std::rethrow_exception(error);
        }

    private:
        int threads_;
    };
}

#endif
