#pragma once

/// Bounded ring of recent samples for one signal stream. Blocks are appended
/// in time order; anything older than the capacity behind the watermark is
/// evicted, so memory stays O(capacity x sample rate) regardless of session
/// length.

#include <cmath>
#include <deque>
#include <optional>
#include <string>

#include "empath/errors.hpp"
#include "empath/signal.hpp"

namespace empath {

class StreamBuffer {
 public:
  StreamBuffer(SignalKind kind, double capacity_s) : kind_(kind), capacity_s_(capacity_s) {
    if (!(capacity_s >= 20.0))
      throw ConfigError("stream buffer capacity must be at least 20 s");
  }

  SignalKind kind() const { return kind_; }
  bool empty() const { return blocks_.empty(); }

  /// End time of the newest ingested sample (0 before any data).
  double watermark() const { return blocks_.empty() ? 0.0 : blocks_.back().end_time(); }

  /// Appends a block. Empty blocks are a no-op; out-of-order or overlapping
  /// blocks are rejected.
  void append(const SampleBlock& block) {
    if (block.kind != kind_)
      throw ValidationError(std::string("stream buffer for ") + to_string(kind_) +
                            " got a " + to_string(block.kind) + " block");
    if (block.sample_count() == 0) return;
    block.validate();
    if (!blocks_.empty()) {
      const SampleBlock& last = blocks_.back();
      if (block.start_time < last.end_time() - 0.5 / block.sample_rate)
        throw ValidationError(std::string("out-of-order ") + to_string(kind_) +
                              " block at t=" + std::to_string(block.start_time) +
                              " (watermark " + std::to_string(last.end_time()) + ")");
      if (block.sample_rate != last.sample_rate)
        throw ValidationError(std::string("stream ") + to_string(kind_) + " changed sample rate");
      if (block.channels != last.channels)
        throw ValidationError(std::string("stream ") + to_string(kind_) + " changed channels");
    }
    blocks_.push_back(block);
    evict();
  }

  /// Gathers the samples with time in [from, to) into one contiguous block.
  /// Returns nullopt when the buffered data does not cover the span (late
  /// start, eviction, or an interior gap): the gathered sample count must
  /// come within one sample of the expected count.
  std::optional<SampleBlock> slice(double from, double to) const {
    if (blocks_.empty() || !(to > from)) return std::nullopt;
    const double fs = blocks_.front().sample_rate;
    const std::size_t expected = static_cast<std::size_t>(std::floor((to - from) * fs + 1e-6));

    SampleBlock out;
    out.kind = kind_;
    out.sample_rate = fs;
    out.channels = blocks_.front().channels;
    out.data.assign(out.channels.size(), {});
    bool have_start = false;
    for (const SampleBlock& b : blocks_) {
      const auto lo = index_at_or_after(b, from);
      const auto hi = index_at_or_after(b, to);
      if (lo >= hi) continue;
      if (!have_start) {
        out.start_time = b.time_at(lo);
        have_start = true;
      }
      for (std::size_t c = 0; c < out.data.size(); ++c)
        out.data[c].insert(out.data[c].end(), b.data[c].begin() + static_cast<std::ptrdiff_t>(lo),
                           b.data[c].begin() + static_cast<std::ptrdiff_t>(hi));
    }
    if (!have_start || out.sample_count() + 1 < expected) return std::nullopt;
    return out;
  }

 private:
  /// First sample index of b with time >= t (clamped to [0, n]).
  static std::size_t index_at_or_after(const SampleBlock& b, double t) {
    const double pos = (t - b.start_time) * b.sample_rate;
    if (pos <= 0.0) return 0;
    const auto idx = static_cast<std::size_t>(std::ceil(pos - 1e-6));
    return std::min(idx, b.sample_count());
  }

  void evict() {
    const double cutoff = watermark() - capacity_s_;
    while (!blocks_.empty() && blocks_.front().end_time() <= cutoff) blocks_.pop_front();
    if (blocks_.empty()) return;
    SampleBlock& front = blocks_.front();
    if (front.start_time < cutoff) {
      const std::size_t drop = index_at_or_after(front, cutoff);
      if (drop > 0 && drop < front.sample_count()) {
        for (auto& channel : front.data)
          channel.erase(channel.begin(), channel.begin() + static_cast<std::ptrdiff_t>(drop));
        front.start_time += static_cast<double>(drop) / front.sample_rate;
      }
    }
  }

  SignalKind kind_;
  double capacity_s_;
  std::deque<SampleBlock> blocks_;
};

}  // namespace empath
