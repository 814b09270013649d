#include "npusim/dma.hpp"

#include <algorithm>
#include <unordered_set>

#include "npusim/rng.hpp"

namespace npusim {

const char* dma_error_name(DmaError e) {
  switch (e) {
    case DmaError::None: return "none";
    case DmaError::QueueFull: return "queue full";
    case DmaError::CyclicChain: return "cyclic chain";
    case DmaError::BadLink: return "bad link";
    case DmaError::BadLength: return "bad length";
  }
  return "?";
}

std::vector<Burst> segment(const DmaDescriptor& d, uint32_t burst_size) {
  std::vector<Burst> bursts;
  const uint32_t count = (d.length + burst_size - 1) / burst_size;
  bursts.reserve(count);
  const uint32_t src_step = d.stride == 0 ? burst_size : d.stride;
  for (uint32_t b = 0; b < count; ++b) {
    const uint32_t off = b * burst_size;
    const uint32_t len = std::min(burst_size, d.length - off);
    bursts.push_back({d.src_addr + b * src_step, d.dst_addr + off, len});
  }
  return bursts;
}

bool StallModel::raw_stall(uint64_t cycle) const {
  if (permille == 0) return false;
  return mix64(seed ^ cycle) % 1000 < permille;
}

DmaEngine::SubmitResult DmaEngine::submit(std::span<const DmaDescriptor> table,
                                          uint32_t head) {
  if (queue_.size() >= kQueueCapacity) return {DmaError::QueueFull, {}};
  if (head >= table.size()) return {DmaError::BadLink, {}};

  // Walk the chain up front: link validity, acyclicity, lengths.
  std::unordered_set<uint32_t> visited;
  std::vector<uint32_t> order;
  int32_t idx = static_cast<int32_t>(head);
  while (idx >= 0) {
    const auto u = static_cast<uint32_t>(idx);
    if (u >= table.size()) return {DmaError::BadLink, {}};
    if (!visited.insert(u).second) return {DmaError::CyclicChain, {}};
    if (table[u].length == 0) return {DmaError::BadLength, {}};
    order.push_back(u);
    idx = table[u].next;
  }

  Transfer t;
  t.id = next_id_++;
  for (uint32_t u : order) {
    const auto bursts = segment(table[u], burst_size_);
    t.bursts.insert(t.bursts.end(), bursts.begin(), bursts.end());
  }
  const DmaTicket ticket{t.id};
  finished_.erase(t.id);
  queue_.push_back(std::move(t));
  return {DmaError::None, ticket};
}

bool DmaEngine::effective_stall(uint64_t cycle) const {
  return stall_.raw_stall(cycle) && stall_run_ < stall_.max_run;
}

bool DmaEngine::wants_bus(uint64_t cycle) const {
  return !queue_.empty() && !effective_stall(cycle);
}

DmaEngine::StepReport DmaEngine::step(Bus& bus, uint64_t cycle) {
  StepReport report;
  if (queue_.empty()) return report;
  if (effective_stall(cycle)) {
    ++stall_run_;
    report.stalled = true;
    return report;
  }
  stall_run_ = 0;

  Transfer& t = queue_.front();
  const Burst& burst = t.bursts[t.next_burst];
  for (uint32_t i = 0; i < burst.len; ++i) {
    uint8_t byte = 0;
    if (!bus.dma_read8(burst.src + i, byte, cycle) ||
        !bus.dma_write8(burst.dst + i, byte, cycle)) {
      finished_[t.id] = TransferState::Failed;
      report.faulted = true;
      report.completed = DmaTicket{t.id};
      queue_.pop_front();
      return report;
    }
    ++report.bytes_moved;
  }
  if (++t.next_burst == t.bursts.size()) {
    finished_[t.id] = TransferState::Done;
    report.completed = DmaTicket{t.id};
    queue_.pop_front();
  }
  return report;
}

TransferState DmaEngine::query(DmaTicket ticket) const {
  const auto it = finished_.find(ticket.id);
  return it == finished_.end() ? TransferState::Pending : it->second;
}

}  // namespace npusim
