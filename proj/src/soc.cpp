#include "npusim/soc.hpp"

#include <cassert>

namespace npusim {

namespace {
// Parameter-snapshot index for a register offset.
constexpr uint32_t pidx(uint32_t offset) { return (offset - reg::PARAM_BASE) / 4; }
}  // namespace

SocSimulator::SocSimulator(SocConfig cfg)
    : cfg_(cfg),
      spm_(cfg.engine.scratchpad_size),
      dma_(cfg.engine.dma_burst_size, cfg.dma_stall),
      pcpi_(regs_, spm_) {
  assert(cfg_.engine.valid());
  bus_ = std::make_unique<Bus>(MemoryMap::standard(cfg_.engine.scratchpad_size), ram_,
                               spm_, uart_, regs_, perf_);
  regs_.set_start_validator([this](const StartEvent& ev) { return validate_start(ev); });
}

GemmParams SocSimulator::decode_gemm(const StartEvent& ev) {
  GemmParams p;
  p.m = ev.params[pidx(reg::DIM0)];
  p.n = ev.params[pidx(reg::DIM1)];
  p.k = ev.params[pidx(reg::DIM2)];
  p.a_addr = ev.params[pidx(reg::ADDR_A)];
  p.b_addr = ev.params[pidx(reg::ADDR_B)];
  p.c_addr = ev.params[pidx(reg::ADDR_C)];
  p.scale = scale_from_word(ev.params[pidx(reg::SCALE)]);
  return p;
}

ConvParams SocSimulator::decode_conv(const StartEvent& ev) {
  ConvParams p;
  p.in_h = ev.params[pidx(reg::DIM0)];
  p.in_w = ev.params[pidx(reg::DIM1)];
  p.in_c = ev.params[pidx(reg::DIM2)];
  p.in_addr = ev.params[pidx(reg::ADDR_A)];
  p.wgt_addr = ev.params[pidx(reg::ADDR_B)];
  p.out_addr = ev.params[pidx(reg::ADDR_C)];
  p.scale = scale_from_word(ev.params[pidx(reg::SCALE)]);
  p.out_c = ev.params[pidx(reg::PARAM0)];
  p.kernel_h = ev.params[pidx(reg::PARAM1)];
  p.kernel_w = ev.params[pidx(reg::PARAM2)];
  p.stride = ev.params[pidx(reg::PARAM3)];
  p.padding = ev.params[pidx(reg::PARAM4)];
  return p;
}

PoolParams SocSimulator::decode_pool(const StartEvent& ev) {
  PoolParams p;
  p.in_h = ev.params[pidx(reg::DIM0)];
  p.in_w = ev.params[pidx(reg::DIM1)];
  p.in_addr = ev.params[pidx(reg::ADDR_A)];
  p.out_addr = ev.params[pidx(reg::ADDR_C)];
  p.mode = ev.params[pidx(reg::PARAM0)] == 0 ? PoolMode::Max : PoolMode::Avg;
  p.window_h = ev.params[pidx(reg::PARAM1)];
  p.window_w = ev.params[pidx(reg::PARAM2)];
  p.stride = ev.params[pidx(reg::PARAM3)];
  return p;
}

ReluParams SocSimulator::decode_relu(const StartEvent& ev) {
  ReluParams p;
  p.count = ev.params[pidx(reg::DIM0)];
  p.src_addr = ev.params[pidx(reg::ADDR_A)];
  p.dst_addr = ev.params[pidx(reg::ADDR_C)];
  return p;
}

DmaDescriptor SocSimulator::decode_transfer(const StartEvent& ev) {
  DmaDescriptor d;
  d.src_addr = ev.params[pidx(reg::ADDR_A)];
  d.dst_addr = ev.params[pidx(reg::ADDR_C)];
  d.length = ev.params[pidx(reg::DIM0)];
  d.stride = ev.params[pidx(reg::PARAM3)];
  return d;
}

bool SocSimulator::validate_start(const StartEvent& ev) const {
  switch (ev.op) {
    case Opcode::Gemm:
      return gemm_params_valid(cfg_.engine, decode_gemm(ev));
    case Opcode::Conv:
      return conv_params_valid(cfg_.engine, decode_conv(ev));
    case Opcode::Pool:
      return ev.params[pidx(reg::PARAM0)] <= 1 &&
             pool_params_valid(cfg_.engine, decode_pool(ev));
    case Opcode::Relu:
      return relu_params_valid(cfg_.engine, decode_relu(ev));
    case Opcode::Load:
    case Opcode::Store: {
      const DmaDescriptor d = decode_transfer(ev);
      if (d.length == 0 || dma_.in_flight() >= DmaEngine::kQueueCapacity) return false;
      const Region* src = bus_->map().decode(d.src_addr);
      const Region* dst = bus_->map().decode(d.dst_addr);
      if (!src || !dst) return false;
      // The opcode carries the direction.
      if (ev.op == Opcode::Load) {
        return src->kind == RegionKind::MainRam && dst->kind == RegionKind::Scratchpad;
      }
      return src->kind == RegionKind::Scratchpad && dst->kind == RegionKind::MainRam;
    }
  }
  return false;
}

void SocSimulator::launch(const StartEvent& ev) {
  op_active_ = true;
  op_start_cycle_ = cycle_;
  op_dma_.reset();
  op_result_ = OpResult{};

  switch (ev.op) {
    case Opcode::Gemm:
      op_result_ = execute_gemm(cfg_.engine, decode_gemm(ev), spm_);
      break;
    case Opcode::Conv:
      op_result_ = execute_conv(cfg_.engine, decode_conv(ev), spm_);
      break;
    case Opcode::Pool:
      op_result_ = execute_pool(cfg_.engine, decode_pool(ev), spm_);
      break;
    case Opcode::Relu:
      op_result_ = execute_relu(cfg_.engine, decode_relu(ev), spm_);
      break;
    case Opcode::Load:
    case Opcode::Store: {
      const auto sub = dma_.submit_single(decode_transfer(ev));
      if (!sub.ok()) {
        complete_op(true);
        return;
      }
      op_dma_ = sub.ticket;
      return;
    }
  }
  assert(op_result_.ok && op_result_.cycles_total > 0);  // validator guarantees
  op_cycles_left_ = op_result_.cycles_total;
}

void SocSimulator::complete_op(bool failed) {
  if (op_dma_) {
    op_result_.cycles_compute = 0;
    op_result_.cycles_total = cycle_ - op_start_cycle_;  // measured transfer time
  }
  if (failed) {
    op_result_.ok = false;
    regs_.flag_error();
  }
  regs_.step_state(true, static_cast<uint32_t>(op_result_.cycles_total));
  perf_.add_macs(op_result_.mac_ops);
  last_op_ = op_result_;
  op_active_ = false;
  op_dma_.reset();
}

void SocSimulator::service_pending_start() {
  if (auto ev = regs_.take_start()) launch(*ev);
}

void SocSimulator::step_one() {
  ++cycle_;
  perf_.add_total(1);

  // DMA owns the bus whenever it can move (priority over CPU traffic).
  if (!dma_.idle()) {
    const auto rep = dma_.step(*bus_, cycle_);
    perf_.add_dma_bytes(rep.bytes_moved);
  }

  if (op_active_) {
    perf_.add_busy(1);
    if (op_dma_) {
      const TransferState st = dma_.query(*op_dma_);
      if (st != TransferState::Pending) complete_op(st == TransferState::Failed);
    } else if (--op_cycles_left_ == 0) {
      complete_op(false);
    }
  }
}

void SocSimulator::step(uint64_t cycles) {
  for (uint64_t i = 0; i < cycles; ++i) step_one();
}

BusReply SocSimulator::cpu_read32(uint32_t addr) {
  if (dma_.wants_bus(cycle_ + 1)) {
    step_one();  // DMA granted first; CPU transaction lands one cycle later
    perf_.add_cpu_stall(1);
  }
  return bus_->read32(addr, BusMaster::Cpu, cycle_);
}

BusFault SocSimulator::cpu_write32(uint32_t addr, uint32_t data) {
  if (dma_.wants_bus(cycle_ + 1)) {
    step_one();
    perf_.add_cpu_stall(1);
  }
  const BusFault fault = bus_->write32(addr, data, BusMaster::Cpu, cycle_);
  service_pending_start();
  return fault;
}

SocSimulator::PollResult SocSimulator::cpu_poll32(uint32_t addr, uint32_t mask,
                                                  uint32_t value_expected,
                                                  uint64_t timeout_cycles) {
  PollResult result;
  const uint64_t start = cycle_;
  while (cycle_ - start < timeout_cycles) {
    step_one();
    const BusReply rep = cpu_read32(addr);
    result.last_value = rep.data;
    if (rep.fault == BusFault::None && (rep.data & mask) == value_expected) {
      result.matched = true;
      break;
    }
  }
  result.cycles_elapsed = cycle_ - start;
  return result;
}

PcpiError SocSimulator::pcpi_issue(const PcpiRequest& req) {
  const PcpiError e = pcpi_.issue(req);
  if (e == PcpiError::None) service_pending_start();
  return e;
}

DmaEngine::SubmitResult SocSimulator::dma_submit(std::span<const DmaDescriptor> table,
                                                 uint32_t head) {
  return dma_.submit(table, head);
}

TransferState SocSimulator::dma_drain(DmaTicket t, uint64_t max_cycles) {
  const uint64_t start = cycle_;
  while (dma_.query(t) == TransferState::Pending && cycle_ - start < max_cycles) {
    step_one();
  }
  return dma_.query(t);
}

bool SocSimulator::load_image(uint32_t base, std::span<const uint8_t> bytes) {
  if (bytes.empty()) return true;
  const Region* r = bus_->map().decode(base);
  if (!r || (r->kind != RegionKind::MainRam && r->kind != RegionKind::Scratchpad)) {
    return false;
  }
  if (uint64_t{base} + bytes.size() - 1 > r->limit) return false;
  ByteMemory& mem = r->kind == RegionKind::MainRam ? static_cast<ByteMemory&>(ram_)
                                                   : static_cast<ByteMemory&>(spm_);
  const uint32_t off = base - r->base;
  for (size_t i = 0; i < bytes.size(); ++i) {
    mem.write8(off + static_cast<uint32_t>(i), bytes[i]);
  }
  return true;
}

bool SocSimulator::dump_image(uint32_t base, std::span<uint8_t> out) const {
  if (out.empty()) return true;
  const Region* r = bus_->map().decode(base);
  if (!r || (r->kind != RegionKind::MainRam && r->kind != RegionKind::Scratchpad)) {
    return false;
  }
  if (uint64_t{base} + out.size() - 1 > r->limit) return false;
  const ByteMemory& mem = r->kind == RegionKind::MainRam
                              ? static_cast<const ByteMemory&>(ram_)
                              : static_cast<const ByteMemory&>(spm_);
  const uint32_t off = base - r->base;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = mem.read8(off + static_cast<uint32_t>(i));
  }
  return true;
}

}  // namespace npusim
