#include "agesim/dataflow.hpp"

#include "agesim/bitword.hpp"
#include "agesim/errors.hpp"

namespace agesim {

MemoryGeometry make_geometry(std::uint64_t total_bits,
                             std::uint32_t word_bits) {
  require(word_bits >= 1, "word width must be >= 1");
  require(total_bits >= word_bits, "memory smaller than one word");
  require(total_bits % word_bits == 0,
          "word width must divide the memory size");
  const std::uint64_t rows = total_bits / word_bits;
  require(rows <= 0xFFFFFFFFull, "row count exceeds 32 bits");
  return {total_bits, word_bits, static_cast<std::uint32_t>(rows)};
}

MemoryGeometry AcceleratorConfig::geometry(QuantFormat fmt) const {
  const std::uint32_t bpw = bits_per_weight(fmt);
  if (kind == AccelKind::BASELINE) {
    require(f >= 1 && N >= 1, "f and N must be >= 1");
    return make_geometry(total_bits, f * N * bpw);
  }
  require(f >= 1 && fifo_tiles >= 1, "f and fifo_tiles must be >= 1");
  const std::uint32_t word_bits = f * bpw;
  const std::uint64_t rows = static_cast<std::uint64_t>(fifo_tiles) * f;
  return make_geometry(rows * word_bits, word_bits);
}

AcceleratorConfig baseline_config(std::uint64_t total_bits, std::uint32_t f,
                                  std::uint32_t N) {
  AcceleratorConfig c;
  c.kind = AccelKind::BASELINE;
  c.f = f;
  c.N = N;
  c.total_bits = total_bits;
  return c;
}

AcceleratorConfig tpu_config(std::uint32_t f, std::uint32_t fifo_tiles) {
  AcceleratorConfig c;
  c.kind = AccelKind::TPU_LIKE;
  c.f = f;
  c.fifo_tiles = fifo_tiles;
  return c;
}

namespace {

struct Packer {
  Partition* part;
  std::uint32_t bpw;
  std::uint32_t lanes;
  Block* block = nullptr;
  std::uint32_t tile_row0 = 0;  // first row of the tile being filled

  Block& new_block() {
    part->blocks.emplace_back();
    block = &part->blocks.back();
    block->bits.assign(
        static_cast<std::size_t>(part->geom.rows) * lanes, 0);
    return *block;
  }

  void put(std::uint32_t row, std::uint32_t field, std::uint32_t code) {
    std::span<std::uint64_t> w{
        block->bits.data() + static_cast<std::size_t>(row) * lanes, lanes};
    bitword::store_field(w, field * bpw, bpw, code);
  }
};

}  // namespace

Partition partition_blocks(const NetworkSpec& net,
                           const std::vector<std::vector<std::uint32_t>>& words,
                           const AcceleratorConfig& config, QuantFormat fmt) {
  require(words.size() == net.layers.size(),
          "word arrays do not match the network's layer list");
  for (std::size_t i = 0; i < words.size(); ++i) {
    require(words[i].size() == net.layers[i].weight_count(),
            "layer " + std::to_string(i) + " word count mismatch");
    require(net.layers[i].f >= 1, "layer with zero filters");
  }

  Partition part;
  part.geom = config.geometry(fmt);
  part.config = config;
  part.format = fmt;
  const std::uint32_t bpw = bits_per_weight(fmt);
  const std::uint32_t f = config.f;
  Packer pk{&part, bpw, part.geom.lanes()};

  if (config.kind == AccelKind::BASELINE) {
    const std::uint32_t N = config.N;
    // capacity in weights = rows * f * N; each filter owns an equal slice
    const std::uint64_t chunk_elems =
        static_cast<std::uint64_t>(part.geom.rows) * N;
    for (std::uint32_t li = 0; li < net.layers.size(); ++li) {
      const LayerSpec& layer = net.layers[li];
      const std::uint64_t P = layer.per_filter();
      const std::uint32_t n_sets = (layer.f + f - 1) / f;
      const std::uint64_t n_chunks = (P + chunk_elems - 1) / chunk_elems;
      for (std::uint32_t s = 0; s < n_sets; ++s) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
          Block& b = pk.new_block();
          const std::uint64_t e0 = c * chunk_elems;
          const std::uint64_t e1 = std::min(P, e0 + chunk_elems);
          for (std::uint32_t j = 0; j < f; ++j) {
            const std::uint64_t fi = static_cast<std::uint64_t>(s) * f + j;
            if (fi >= layer.f) break;
            const std::uint32_t* src = words[li].data() + fi * P;
            for (std::uint64_t e = e0; e < e1; ++e) {
              const std::uint64_t off = e - e0;  // position within chunk
              pk.put(static_cast<std::uint32_t>(off / N),
                     j * N + static_cast<std::uint32_t>(off % N), src[e]);
            }
            b.real_weights += e1 - e0;
          }
          part.map.push_back({part.K_inf() - 1, 0,
                              static_cast<std::int32_t>(li), s, e0, e1});
        }
      }
    }
  } else {
    // TPU_LIKE: the layer's weight matrix (per_filter x filters) is cut
    // into f x f tiles; tile t of the stream lands in FIFO slot
    // t mod fifo_tiles, and fifo_tiles consecutive tiles form one block.
    const std::uint32_t fifo = config.fifo_tiles;
    std::uint32_t tile = 0;
    auto open_tile = [&]() {
      const std::uint32_t slot = tile % fifo;
      if (slot == 0) pk.new_block();
      pk.tile_row0 = slot * f;
      ++tile;
      return slot;
    };
    for (std::uint32_t li = 0; li < net.layers.size(); ++li) {
      const LayerSpec& layer = net.layers[li];
      const std::uint64_t P = layer.per_filter();
      const std::uint32_t n_sets = (layer.f + f - 1) / f;
      const std::uint64_t n_chunks = (P + f - 1) / f;
      for (std::uint32_t s = 0; s < n_sets; ++s) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
          const std::uint32_t slot = open_tile();
          const std::uint64_t e0 = c * f;
          const std::uint64_t e1 = std::min(P, e0 + f);
          for (std::uint32_t j = 0; j < f; ++j) {
            const std::uint64_t fi = static_cast<std::uint64_t>(s) * f + j;
            if (fi >= layer.f) break;
            const std::uint32_t* src = words[li].data() + fi * P;
            for (std::uint64_t e = e0; e < e1; ++e) {
              pk.put(pk.tile_row0 + static_cast<std::uint32_t>(e - e0), j,
                     src[e]);
            }
            pk.block->real_weights += e1 - e0;
          }
          part.map.push_back({part.K_inf() - 1, slot,
                              static_cast<std::int32_t>(li), s, e0, e1});
        }
      }
    }
    // zero tiles keep every slot written equally often per inference
    while (tile % fifo != 0) {
      const std::uint32_t slot = open_tile();
      part.map.push_back({part.K_inf() - 1, slot, -1, 0, 0, 0});
    }
  }

  require(!part.blocks.empty(), "network produced no blocks");
  for (const Block& b : part.blocks) part.real_weights += b.real_weights;
  part.total_fields = static_cast<std::uint64_t>(part.K_inf()) *
                      part.geom.rows * config.weights_per_word();
  return part;
}

WriteStream build_write_stream(Partition part, std::uint32_t inferences,
                               std::uint32_t dwell_units) {
  require(inferences >= 1, "inferences must be >= 1");
  require(dwell_units >= 1, "dwell_units must be >= 1");
  const std::uint64_t total = static_cast<std::uint64_t>(part.K_inf()) *
                              inferences * dwell_units;
  require(total <= 0xFFFFFFFFull,
          "total dwell exceeds the 32-bit per-cell counters");
  return {std::move(part), inferences, dwell_units};
}

}  // namespace agesim
