#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "node.hpp"

namespace dsvp::demo {

// Node-resident state behind the counter service. Lives at an exclusive
// place: the increment itself is deliberately a read/spin/write sequence
// with no lock of its own, so lost updates expose any failure of the
// place to sequentialize its families.
struct DemoState {
    std::atomic<int64_t> counter{0};
    std::mutex interval_mu;
    std::vector<std::pair<int64_t, int64_t>> intervals; // [start,end) ns, bookkeeping only
};

inline int64_t steady_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

inline void sleep_with_polls(ThreadContext &ctx, int64_t ms) {
    auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    while (std::chrono::steady_clock::now() < until) {
        ctx.poll_kill();
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    ctx.poll_kill();
}

// Registers the example thread functions on a node. Every function gets a
// description function, so all of them can be created remotely.
inline std::shared_ptr<DemoState> register_demo_functions(NodeRuntime &nrt) {
    auto st = std::make_shared<DemoState>();

    // The empty function: the latency benchmark subject.
    nrt.register_thread_function(
        "empty", FunctionEntry{[](ThreadContext &) {}, {}, {}}, [](DescribeContext &) {});

    // Shared channels p1, p2 carry the two-term recurrence; the result
    // array rides a global buffer reference. Indices start at 2 and the
    // caller seeds result[0..1].
    auto fib_body = [](ThreadContext &ctx) {
        int64_t p1 = ctx.read_shared(0).as_i64();
        int64_t p2 = ctx.read_shared(1).as_i64();
        Buffer &result = ctx.global_buffer(0);
        int64_t v = p1 + p2;
        result.set_i64(static_cast<size_t>(ctx.index()), v);
        ctx.write_shared(1, Value::of_i64(p1)); // p2 = p1
        ctx.write_shared(0, Value::of_i64(v));  // p1 = result[i]
    };
    auto fib_describe = [](DescribeContext &d) {
        d.input(0);
        d.input(1);
        for (uint64_t i = 2; i < d.extent(2); ++i) d.output(2, i, 1);
    };
    nrt.register_thread_function(
        "fibonacci",
        FunctionEntry{fib_body, {TypeCode::i64, TypeCode::i64}, {TypeCode::bufref}},
        fib_describe);

    // fibonacci with a per-thread startup delay (global 1, milliseconds);
    // long enough families can be interrupted mid-run.
    nrt.register_thread_function(
        "fib_slow",
        FunctionEntry{[fib_body](ThreadContext &ctx) {
                          sleep_with_polls(ctx, ctx.read_global(1).as_i64());
                          fib_body(ctx);
                      },
                      {TypeCode::i64, TypeCode::i64},
                      {TypeCode::bufref, TypeCode::i64}},
        [](DescribeContext &d) {
            d.input(0);
            d.input(1);
            d.input(3);
            for (uint64_t i = 2; i < d.extent(2); ++i) d.output(2, i, 1);
        });

    // Fills out[index] with the stamp value after a delay. Restart tests
    // use distinct stamps to prove only one attempt's outputs land.
    nrt.register_thread_function(
        "stamp_fill",
        FunctionEntry{[](ThreadContext &ctx) {
                          sleep_with_polls(ctx, ctx.read_global(2).as_i64());
                          ctx.global_buffer(0).set_i64(static_cast<size_t>(ctx.index()),
                                                       ctx.read_global(1).as_i64());
                      },
                      {},
                      {TypeCode::bufref, TypeCode::i64, TypeCode::i64}},
        [](DescribeContext &d) {
            d.input(1);
            d.input(2);
            d.output(0);
        });

    // Adds one to its element; the transfer set moves the buffer both
    // directions.
    nrt.register_thread_function(
        "bump_all",
        FunctionEntry{[](ThreadContext &ctx) {
                          Buffer &b = ctx.global_buffer(0);
                          size_t i = static_cast<size_t>(ctx.index());
                          b.set_i64(i, b.get_i64(i) + 1);
                      },
                      {},
                      {TypeCode::bufref}},
        [](DescribeContext &d) { d.inout(0); });

    // Counter service resident at an exclusive place.
    nrt.register_thread_function(
        "counter_inc",
        FunctionEntry{[st](ThreadContext &ctx) {
                          (void)ctx;
                          int64_t t0 = steady_ns();
                          int64_t v = st->counter.load(std::memory_order_relaxed);
                          while (steady_ns() - t0 < 20'000) {
                          } // widen the read/write window
                          st->counter.store(v + 1, std::memory_order_relaxed);
                          int64_t t1 = steady_ns();
                          std::lock_guard<std::mutex> lk(st->interval_mu);
                          st->intervals.emplace_back(t0, t1);
                      },
                      {},
                      {}},
        [](DescribeContext &) {});

    nrt.register_thread_function(
        "counter_get",
        FunctionEntry{[st](ThreadContext &ctx) {
                          ctx.global_buffer(0).set_i64(0, st->counter.load());
                      },
                      {},
                      {TypeCode::bufref}},
        [](DescribeContext &d) { d.output(0); });

    // Writes recorded [start,end) pairs into the out buffer; slot 0 gets
    // the pair count.
    nrt.register_thread_function(
        "counter_intervals",
        FunctionEntry{[st](ThreadContext &ctx) {
                          Buffer &out = ctx.global_buffer(0);
                          std::lock_guard<std::mutex> lk(st->interval_mu);
                          size_t pairs = st->intervals.size();
                          size_t fit = std::min(pairs, (out.extent() - 1) / 2);
                          out.set_i64(0, static_cast<int64_t>(fit));
                          for (size_t i = 0; i < fit; ++i) {
                              out.set_i64(1 + 2 * i, st->intervals[i].first);
                              out.set_i64(2 + 2 * i, st->intervals[i].second);
                          }
                      },
                      {},
                      {TypeCode::bufref}},
        [](DescribeContext &d) { d.output(0); });

    // Runs until killed.
    nrt.register_thread_function(
        "spin_forever",
        FunctionEntry{[](ThreadContext &ctx) {
                          for (;;) {
                              ctx.poll_kill();
                              std::this_thread::sleep_for(std::chrono::microseconds(500));
                          }
                      },
                      {},
                      {}},
        [](DescribeContext &) {});

    nrt.register_thread_function(
        "sleep_ms",
        FunctionEntry{[](ThreadContext &ctx) {
                          sleep_with_polls(ctx, ctx.read_global(0).as_i64());
                      },
                      {},
                      {TypeCode::i64}},
        [](DescribeContext &d) { d.input(0); });

    // Creates spin_forever on the place named by global 0 and waits on
    // it; the delegation chain test drives kill recursion through here.
    nrt.register_thread_function(
        "chain_spin",
        FunctionEntry{[&nrt](ThreadContext &ctx) {
                          FamilyDescriptor desc;
                          desc.place = nrt.resolve_place(ctx.read_global(0).as_string());
                          desc.range = RangeSpec{0, 1, 1, 0};
                          desc.function = "spin_forever";
                          FamilyHandle child = ctx.create(std::move(desc));
                          child->sync();
                          ctx.poll_kill();
                      },
                      {},
                      {TypeCode::bytes}},
        [](DescribeContext &d) { d.input(0); });

    return st;
}

} // namespace dsvp::demo
