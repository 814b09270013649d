#include "npusim/script.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace npusim {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    const size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    toks.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return toks;
}

std::optional<uint64_t> to_u64(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const int base =
      s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X') ? 16 : 10;
  const unsigned long long v = std::strtoull(s.c_str(), &end, base);
  if (errno != 0 || end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::optional<uint32_t> to_u32(const std::string& s) {
  const auto v = to_u64(s);
  if (!v || *v > 0xFFFFFFFFull) return std::nullopt;
  return static_cast<uint32_t>(*v);
}

// Register naming for the transaction log.
struct MmioName {
  const char* action = nullptr;  // "status register" (null: plain address)
  const char* value = "Data";
  bool is_status = false;
  bool is_control = false;
};

MmioName mmio_name(uint32_t addr) {
  if (addr == memmap::kNeuralRegsBase + reg::STATUS) {
    return {"status register", "Status", true, false};
  }
  if (addr == memmap::kNeuralRegsBase + reg::CONTROL) {
    return {"control register", "Control", false, true};
  }
  if (addr == memmap::kNeuralRegsBase + reg::CYCLE_COUNT) {
    return {"cycle count register", "CycleCount", false, false};
  }
  if (addr >= memmap::kNeuralRegsBase + reg::PARAM_BASE &&
      addr < memmap::kNeuralRegsBase + reg::PARAM_BASE + 4 * reg::PARAM_WORDS) {
    return {"parameter register", "Data", false, false};
  }
  return {};
}

void log_value(Logger& log, const MmioName& name, uint32_t value) {
  if (name.is_status) {
    log.info("%s = 0x%08X (%s)", name.value, value, decode_status_word(value).c_str());
  } else if (name.is_control) {
    log.info("%s = 0x%08X (%s)", name.value, value, decode_control_word(value).c_str());
  } else {
    log.info("%s = 0x%08X", name.value, value);
  }
}

class Runner {
 public:
  Runner(SocSimulator& sim, Logger& log) : sim_(sim), log_(log) {}

  ScriptRunStats run(const std::vector<ScriptCommand>& commands) {
    for (const ScriptCommand& cmd : commands) {
      std::visit([this](const auto& c) { exec(c); }, cmd);
    }
    return stats_;
  }

 private:
  void exec(const CmdWrite& c) {
    const MmioName name = mmio_name(c.addr);
    if (name.action) {
      log_.info("Writing %s @ 0x%08X", name.action, c.addr);
    } else {
      log_.info("Writing @ 0x%08X", c.addr);
    }
    const BusFault fault = sim_.cpu_write32(c.addr, c.data);
    if (fault != BusFault::None) {
      log_.error("Bus fault (%s) @ 0x%08X", bus_fault_name(fault), c.addr);
      return;
    }
    log_value(log_, name, c.data);
  }

  void exec(const CmdRead& c) {
    const MmioName name = mmio_name(c.addr);
    if (name.action) {
      log_.info("Reading %s @ 0x%08X", name.action, c.addr);
    } else {
      log_.info("Reading @ 0x%08X", c.addr);
    }
    const BusReply rep = sim_.cpu_read32(c.addr);
    if (rep.fault != BusFault::None) {
      log_.error("Bus fault (%s) @ 0x%08X", bus_fault_name(rep.fault), c.addr);
    } else {
      log_value(log_, name, rep.data);
    }
    if (c.expect && rep.data != *c.expect) {
      log_.error("Expected 0x%08X, read 0x%08X @ 0x%08X", *c.expect, rep.data, c.addr);
      ++stats_.expect_mismatches;
    }
  }

  void exec(const CmdPoll& c) {
    log_.info("Polling for completion...");
    const auto res = sim_.cpu_poll32(c.addr, c.mask, c.value, c.timeout);
    if (!res.matched) {
      log_.error("Poll timeout @ 0x%08X (mask 0x%08X value 0x%08X) after %llu cycles",
                 c.addr, c.mask, c.value,
                 static_cast<unsigned long long>(res.cycles_elapsed));
      ++stats_.poll_timeouts;
      return;
    }
    const MmioName name = mmio_name(c.addr);
    // For the status register the latency shown is the engine's latched
    // CYCLE_COUNT; other polls show elapsed poll cycles.
    const unsigned long long shown =
        name.is_status ? sim_.regs().cycle_count()
                       : static_cast<unsigned long long>(res.cycles_elapsed);
    if (name.is_status) {
      log_.info("Status = 0x%08X (%s) after %llu cycles", res.last_value,
                decode_status_word(res.last_value).c_str(), shown);
    } else {
      log_.info("%s = 0x%08X after %llu cycles", name.value, res.last_value, shown);
    }
  }

  void exec(const CmdStep& c) {
    sim_.step(c.cycles);
    log_.debug("step %llu (now cycle %llu)",
               static_cast<unsigned long long>(c.cycles),
               static_cast<unsigned long long>(sim_.cycle()));
  }

  void exec(const CmdLoadImage& c) {
    std::ifstream in(c.path, std::ios::binary);
    if (!in) {
      log_.error("Cannot open image %s", c.path.c_str());
      ++stats_.io_errors;
      return;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    if (!sim_.load_image(c.base,
                         {reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()})) {
      log_.error("Image does not fit @ 0x%08X (%zu bytes)", c.base, bytes.size());
      ++stats_.io_errors;
      return;
    }
    log_.info("Loaded %zu bytes @ 0x%08X from %s", bytes.size(), c.base, c.path.c_str());
  }

  void exec(const CmdDumpImage& c) {
    std::vector<uint8_t> bytes(c.len);
    if (!sim_.dump_image(c.base, bytes)) {
      log_.error("Dump range invalid @ 0x%08X (%u bytes)", c.base, c.len);
      ++stats_.io_errors;
      return;
    }
    std::ofstream out(c.path, std::ios::binary | std::ios::trunc);
    if (!out ||
        !out.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()))) {
      log_.error("Cannot write image %s", c.path.c_str());
      ++stats_.io_errors;
      return;
    }
    log_.info("Dumped %u bytes @ 0x%08X to %s", c.len, c.base, c.path.c_str());
  }

  void exec(const CmdPcpiIssue& c) {
    PcpiRequest req;
    if (c.op) {
      req.insn = encode_pcpi_insn(PcpiFunct::StartOp, *c.op);
      req.rs1 = c.rs1;
      log_.info("PCPI issue %s rs1=0x%08X", opcode_name(*c.op), c.rs1);
    } else {
      req.insn = encode_pcpi_insn(PcpiFunct::QueryStatus);
      log_.info("PCPI issue STATUS");
    }
    if (sim_.pcpi_issue(req) != PcpiError::None) {
      log_.error("PCPI illegal instruction 0x%08X", req.insn);
    }
  }

  void exec(const CmdPcpiPoll& c) {
    const uint64_t start = sim_.cycle();
    PcpiResponse resp = sim_.pcpi_poll();
    while (!resp.ready && sim_.cycle() - start < c.timeout) {
      sim_.step(1);
      resp = sim_.pcpi_poll();
    }
    if (!resp.ready) {
      log_.error("PCPI poll timeout after %llu cycles",
                 static_cast<unsigned long long>(sim_.cycle() - start));
      ++stats_.poll_timeouts;
      return;
    }
    log_.info("PCPI rd = 0x%08X (%s) after %llu cycles", resp.rd,
              decode_status_word(resp.rd).c_str(),
              static_cast<unsigned long long>(sim_.cycle() - start));
  }

  void exec(const CmdDmaBegin&) { chain_.clear(); }

  void exec(const CmdDmaDesc& c) { chain_.push_back(c.desc); }

  void exec(const CmdDmaSubmit&) {
    submit_chain(chain_);
    chain_.clear();
  }

  void exec(const CmdDmaWait& c) {
    if (!last_ticket_) {
      log_.error("DMA wait without a submitted transfer");
      ++stats_.io_errors;
      return;
    }
    const TransferState st = sim_.dma_drain(*last_ticket_, c.timeout);
    if (st == TransferState::Done) {
      log_.info("DMA transfer %u done", last_ticket_->id);
    } else if (st == TransferState::Failed) {
      log_.error("DMA transfer %u failed (bus fault)", last_ticket_->id);
    } else {
      log_.error("DMA wait timeout on transfer %u", last_ticket_->id);
      ++stats_.poll_timeouts;
    }
  }

  void submit_chain(std::vector<DmaDescriptor> chain) {
    if (chain.empty()) {
      log_.error("DMA submit with no descriptors");
      ++stats_.io_errors;
      return;
    }
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      chain[i].next = static_cast<int32_t>(i + 1);
    }
    chain.back().next = -1;
    const auto sub = sim_.dma_submit(chain, 0);
    if (!sub.ok()) {
      log_.error("DMA submit rejected (%s)", dma_error_name(sub.error));
      ++stats_.io_errors;
      return;
    }
    last_ticket_ = sub.ticket;
    log_.info("DMA transfer %u submitted (%zu descriptors)", sub.ticket.id,
              chain.size());
  }

  SocSimulator& sim_;
  Logger& log_;
  ScriptRunStats stats_;
  std::vector<DmaDescriptor> chain_;
  std::optional<DmaTicket> last_ticket_;
};

}  // namespace

ScriptParseResult parse_script_text(const std::string& text) {
  ScriptParseResult result;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  const auto fail = [&](const std::string& msg, int col) {
    result.error = {msg, lineno, col};
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const std::vector<Token> t = tokenize(raw);
    if (t.empty()) continue;
    const std::string& cmd = t[0].text;

    const auto need_u32 = [&](size_t i) -> std::optional<uint32_t> {
      if (i >= t.size()) {
        fail("missing argument for `" + cmd + "`", static_cast<int>(raw.size()) + 1);
        return std::nullopt;
      }
      const auto v = to_u32(t[i].text);
      if (!v) fail("bad 32-bit value `" + t[i].text + "`", t[i].column);
      return v;
    };
    const auto need_u64 = [&](size_t i) -> std::optional<uint64_t> {
      if (i >= t.size()) {
        fail("missing argument for `" + cmd + "`", static_cast<int>(raw.size()) + 1);
        return std::nullopt;
      }
      const auto v = to_u64(t[i].text);
      if (!v) fail("bad integer `" + t[i].text + "`", t[i].column);
      return v;
    };

    if (cmd == "write") {
      const auto addr = need_u32(1);
      const auto data = need_u32(2);
      if (!addr || !data) return result;
      result.commands.push_back(CmdWrite{*addr, *data});
    } else if (cmd == "read") {
      const auto addr = need_u32(1);
      if (!addr) return result;
      std::optional<uint32_t> expect;
      if (t.size() > 2) {
        if (t[2].text != "expect") {
          fail("expected `expect`", t[2].column);
          return result;
        }
        expect = need_u32(3);
        if (!expect) return result;
      }
      result.commands.push_back(CmdRead{*addr, expect});
    } else if (cmd == "poll") {
      // poll <addr> mask <m> value <v> timeout <n>
      if (t.size() != 8 || t[2].text != "mask" || t[4].text != "value" ||
          t[6].text != "timeout") {
        fail("usage: poll <addr> mask <m> value <v> timeout <cycles>", t[0].column);
        return result;
      }
      const auto addr = need_u32(1);
      const auto mask = need_u32(3);
      const auto value = need_u32(5);
      const auto timeout = need_u64(7);
      if (!addr || !mask || !value || !timeout) return result;
      result.commands.push_back(CmdPoll{*addr, *mask, *value, *timeout});
    } else if (cmd == "step") {
      const auto n = need_u64(1);
      if (!n) return result;
      result.commands.push_back(CmdStep{*n});
    } else if (cmd == "load-image") {
      if (t.size() != 3) {
        fail("usage: load-image <path> <base>", t[0].column);
        return result;
      }
      const auto base = need_u32(2);
      if (!base) return result;
      result.commands.push_back(CmdLoadImage{t[1].text, *base});
    } else if (cmd == "dump-image") {
      if (t.size() != 4) {
        fail("usage: dump-image <path> <base> <len>", t[0].column);
        return result;
      }
      const auto base = need_u32(2);
      const auto len = need_u32(3);
      if (!base || !len) return result;
      result.commands.push_back(CmdDumpImage{t[1].text, *base, *len});
    } else if (cmd == "pcpi-issue") {
      if (t.size() < 2) {
        fail("usage: pcpi-issue <op> [rs1] | pcpi-issue status", t[0].column);
        return result;
      }
      if (t[1].text == "status") {
        result.commands.push_back(CmdPcpiIssue{std::nullopt, 0});
      } else {
        const auto op = opcode_from_name(t[1].text);
        if (!op) {
          fail("unknown opcode `" + t[1].text + "`", t[1].column);
          return result;
        }
        const auto rs1 = need_u32(2);
        if (!rs1) return result;
        result.commands.push_back(CmdPcpiIssue{*op, *rs1});
      }
    } else if (cmd == "pcpi-poll") {
      const auto timeout = need_u64(1);
      if (!timeout) return result;
      result.commands.push_back(CmdPcpiPoll{*timeout});
    } else if (cmd == "dma") {
      const auto src = need_u32(1);
      const auto dst = need_u32(2);
      const auto len = need_u32(3);
      if (!src || !dst || !len) return result;
      uint32_t stride = 0;
      if (t.size() > 4) {
        const auto s = need_u32(4);
        if (!s) return result;
        stride = *s;
      }
      result.commands.push_back(CmdDmaBegin{});
      result.commands.push_back(CmdDmaDesc{DmaDescriptor{*src, *dst, *len, stride, -1}});
      result.commands.push_back(CmdDmaSubmit{});
    } else if (cmd == "dma-begin") {
      result.commands.push_back(CmdDmaBegin{});
    } else if (cmd == "dma-desc") {
      if (t.size() != 5) {
        fail("usage: dma-desc <src> <dst> <len> <stride>", t[0].column);
        return result;
      }
      const auto src = need_u32(1);
      const auto dst = need_u32(2);
      const auto len = need_u32(3);
      const auto stride = need_u32(4);
      if (!src || !dst || !len || !stride) return result;
      result.commands.push_back(CmdDmaDesc{DmaDescriptor{*src, *dst, *len, *stride, -1}});
    } else if (cmd == "dma-submit") {
      result.commands.push_back(CmdDmaSubmit{});
    } else if (cmd == "dma-wait") {
      const auto timeout = need_u64(1);
      if (!timeout) return result;
      result.commands.push_back(CmdDmaWait{*timeout});
    } else {
      fail("unknown command `" + cmd + "`", t[0].column);
      return result;
    }
  }
  return result;
}

ScriptParseResult parse_script_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ScriptParseResult r;
    r.error = {"cannot open " + path, 0, 0};
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_script_text(ss.str());
}

ScriptRunStats run_script(SocSimulator& sim, const std::vector<ScriptCommand>& commands,
                          Logger& log) {
  Runner runner(sim, log);
  return runner.run(commands);
}

}  // namespace npusim
