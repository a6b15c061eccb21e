#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace divnorm {

// Index grid at which traces are sampled. Depending on the caller an index is a
// block count n or a step count |w|.
//
// Open-ended grids (geometric, every) also close on the last index the input
// actually reached; explicit lists never do, and report truncation instead.
class CheckpointSpec {
 public:
  enum class Kind { geometric, every, list };

  // ⌈start·(5/4)^k⌉ for k = 0, 1, ..., computed exactly.
  static CheckpointSpec geometric(std::uint64_t start = 16);
  static CheckpointSpec every(std::uint64_t stride);
  static CheckpointSpec list(std::vector<std::uint64_t> points);

  // `geom`, `geom:<start>`, `every:<k>`, or a comma-separated list.
  static CheckpointSpec parse(std::string_view text);
  std::string describe() const;

  Kind kind() const noexcept { return kind_; }
  bool closes_at_end() const noexcept { return kind_ != Kind::list; }

  // Smallest grid index strictly greater than `after`; 0 when the grid is
  // exhausted (explicit lists only).
  std::uint64_t next_after(std::uint64_t after) const;
  // Largest explicit point; 0 for open-ended grids.
  std::uint64_t last_point() const noexcept;

  // Every grid index ≤ limit, plus `limit` itself for open-ended grids.
  std::vector<std::uint64_t> resolve(std::uint64_t limit) const;

 private:
  CheckpointSpec(Kind kind, std::uint64_t param) : kind_(kind), param_(param) {}

  Kind kind_;
  std::uint64_t param_;
  std::vector<std::uint64_t> points_;
};

}  // namespace divnorm
