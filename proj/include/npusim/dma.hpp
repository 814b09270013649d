#ifndef NPUSIM_DMA_HPP
#define NPUSIM_DMA_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "npusim/bus.hpp"

namespace npusim {

// Scatter-gather transfer record. `stride` is the source-address advance per
// burst (0 = contiguous, i.e. advance by the burst size); the destination is
// always packed contiguous. `next` links to another descriptor by index in
// the submitted table; -1 ends the chain.
struct DmaDescriptor {
  uint32_t src_addr = 0;
  uint32_t dst_addr = 0;
  uint32_t length = 0;  // bytes, > 0
  uint32_t stride = 0;
  int32_t next = -1;
};

struct Burst {
  uint32_t src = 0;
  uint32_t dst = 0;
  uint32_t len = 0;
};

// Split one descriptor into bursts of at most burst_size bytes:
// count = ceil(length / burst_size), lengths sum to length exactly.
std::vector<Burst> segment(const DmaDescriptor& d, uint32_t burst_size);

enum class DmaError : uint8_t {
  None = 0,
  QueueFull,     // 8 transfers already outstanding
  CyclicChain,   // descriptor loop (visited-set check at submission)
  BadLink,       // next index outside the submitted table
  BadLength,     // zero-length descriptor
};

const char* dma_error_name(DmaError e);

struct DmaTicket {
  uint32_t id = 0;
};

enum class TransferState : uint8_t { Pending, Done, Failed };

// Deterministic backpressure: a raw per-cycle stall draw (seeded hash,
// `permille` chance) capped at `max_run` consecutive effective stalls, so a
// burst is never delayed more than max_run cycles. permille=0 never stalls;
// permille=1000 with max_run=1 stalls every other service cycle.
struct StallModel {
  uint64_t seed = 0;
  uint32_t permille = 0;
  uint32_t max_run = 4;

  bool raw_stall(uint64_t cycle) const;
};

// Single-channel scatter-gather DMA: up to 8 outstanding transfers, serviced
// in submission order, one burst per cycle at most (64 bytes/cycle peak). A
// burst denied by backpressure retries the next cycle with no data loss. A
// bus fault on any byte fails the transfer and frees its slot.
class DmaEngine {
 public:
  static constexpr uint32_t kQueueCapacity = 8;

  explicit DmaEngine(uint32_t burst_size = 64, StallModel stall = {})
      : burst_size_(burst_size), stall_(stall) {}

  struct SubmitResult {
    DmaError error = DmaError::None;
    DmaTicket ticket{};
    bool ok() const { return error == DmaError::None; }
  };

  // Copies the chain starting at table[head]; the table may hold unrelated
  // descriptors. Chain validity (links, acyclicity, lengths) is checked here;
  // address validity surfaces per burst as a bus fault.
  SubmitResult submit(std::span<const DmaDescriptor> table, uint32_t head = 0);

  SubmitResult submit_single(const DmaDescriptor& d) {
    return submit(std::span<const DmaDescriptor>(&d, 1), 0);
  }

  // True when a burst would move in `cycle` (in-flight work, not stalled).
  // The SoC uses this for bus-grant contention before stepping.
  bool wants_bus(uint64_t cycle) const;

  struct StepReport {
    uint32_t bytes_moved = 0;
    bool stalled = false;
    bool faulted = false;
    std::optional<DmaTicket> completed;
  };

  // One cycle of service on the head transfer.
  StepReport step(Bus& bus, uint64_t cycle);

  TransferState query(DmaTicket t) const;
  uint32_t in_flight() const { return static_cast<uint32_t>(queue_.size()); }
  bool idle() const { return queue_.empty(); }
  uint32_t burst_size() const { return burst_size_; }
  void set_stall_model(StallModel stall) { stall_ = stall; }

 private:
  struct Transfer {
    uint32_t id = 0;
    std::vector<Burst> bursts;
    uint32_t next_burst = 0;
  };

  bool effective_stall(uint64_t cycle) const;

  uint32_t burst_size_;
  StallModel stall_;
  std::deque<Transfer> queue_;
  std::unordered_map<uint32_t, TransferState> finished_;
  uint32_t next_id_ = 1;
  uint32_t stall_run_ = 0;  // consecutive effective stalls on the head burst
};

}  // namespace npusim

#endif  // NPUSIM_DMA_HPP
