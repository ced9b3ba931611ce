#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agesim/weights.hpp"

namespace agesim {

struct MemoryGeometry {
  std::uint64_t total_bits = 0;
  std::uint32_t word_bits = 0;  // one stored word = one row
  std::uint32_t rows = 0;       // total_bits / word_bits
  std::uint64_t cells() const { return total_bits; }
  std::uint32_t lanes() const { return (word_bits + 63u) / 64u; }
};

MemoryGeometry make_geometry(std::uint64_t total_bits,
                             std::uint32_t word_bits);

enum class AccelKind { BASELINE, TPU_LIKE };

// BASELINE: one memory word feeds all PEs for a cycle (f*N weights).
// TPU_LIKE: weight FIFO of fifo_tiles slots, each slot one f*f tile; a
// word is one tile row (f weights), so rows = fifo_tiles * f.
struct AcceleratorConfig {
  AccelKind kind = AccelKind::BASELINE;
  std::uint32_t f = 8;
  std::uint32_t N = 8;            // BASELINE only
  std::uint32_t fifo_tiles = 4;   // TPU_LIKE only
  std::uint64_t total_bits = 0;   // BASELINE only; TPU size is implied

  std::uint32_t weights_per_word() const {
    return kind == AccelKind::BASELINE ? f * N : f;
  }
  MemoryGeometry geometry(QuantFormat fmt) const;
};

AcceleratorConfig baseline_config(std::uint64_t total_bits,
                                  std::uint32_t f = 8, std::uint32_t N = 8);
AcceleratorConfig tpu_config(std::uint32_t f = 256,
                             std::uint32_t fifo_tiles = 4);

// One full-memory image: rows * word_bits bits. For TPU_LIKE a block is
// one FIFO generation (fifo_tiles consecutive tiles, tile t in slot
// t mod fifo_tiles), so both kinds write every row exactly once per block.
struct Block {
  std::vector<std::uint64_t> bits;  // rows * lanes, row-major
  std::uint64_t real_weights = 0;   // non-padding fields in this block
};

// Debug map entry: one per block (BASELINE) or per tile (TPU_LIKE).
// layer < 0 marks a zero tile appended for FIFO alignment.
struct BlockInfo {
  std::uint32_t block = 0;
  std::uint32_t slot = 0;
  std::int32_t layer = -1;
  std::uint32_t filter_set = 0;
  std::uint64_t elem_lo = 0;  // per-filter element range covered
  std::uint64_t elem_hi = 0;
};

struct Partition {
  MemoryGeometry geom;
  AcceleratorConfig config;
  QuantFormat format = QuantFormat::FLOAT32;
  std::vector<Block> blocks;       // K_inf entries
  std::vector<BlockInfo> map;
  std::uint64_t real_weights = 0;  // across one inference
  std::uint64_t total_fields = 0;  // K_inf * rows * weights_per_word

  std::uint32_t K_inf() const {
    return static_cast<std::uint32_t>(blocks.size());
  }
  double padding_fraction() const {
    return total_fields == 0
               ? 0.0
               : 1.0 - static_cast<double>(real_weights) /
                           static_cast<double>(total_fields);
  }
  std::span<const std::uint64_t> row(const Block& b, std::uint32_t r) const {
    return {b.bits.data() + static_cast<std::size_t>(r) * geom.lanes(),
            geom.lanes()};
  }
};

// Slices each layer's words into memory-capacity blocks: filters grouped
// into sets of f, each filter traversed in tensor order and cut into
// equal chunks, one word interleaving the set's filters. Short sets and
// partial chunks are padded with zero fields.
Partition partition_blocks(const NetworkSpec& net,
                           const std::vector<std::vector<std::uint32_t>>& words,
                           const AcceleratorConfig& config, QuantFormat fmt);

// Per inference the blocks are written in partition order, each block
// overwriting the whole memory row by row; every cell sees
// K_inf * inferences mappings of dwell_units each.
struct WriteStream {
  Partition part;
  std::uint32_t inferences = 1;
  std::uint32_t dwell_units = 1;

  std::uint64_t writes_per_cell() const {
    return static_cast<std::uint64_t>(part.K_inf()) * inferences;
  }

  // Calls fn(row, word_lanes, dwell_units) for every write event in
  // stream order.
  template <typename F>
  void for_each_event(F&& fn) const {
    for (std::uint32_t inf = 0; inf < inferences; ++inf) {
      for (const Block& b : part.blocks) {
        for (std::uint32_t r = 0; r < part.geom.rows; ++r) {
          fn(r, part.row(b, r), dwell_units);
        }
      }
    }
  }
};

WriteStream build_write_stream(Partition part, std::uint32_t inferences,
                               std::uint32_t dwell_units = 1);

}  // namespace agesim
