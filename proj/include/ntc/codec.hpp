#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntc/bitstream.hpp"
#include "ntc/coeffs.hpp"
#include "ntc/common.hpp"
#include "ntc/context.hpp"
#include "ntc/dct.hpp"
#include "ntc/intra.hpp"
#include "ntc/klt.hpp"
#include "ntc/lfnst.hpp"
#include "ntc/model_io.hpp"
#include "ntc/predictor.hpp"
#include "ntc/quant.hpp"
#include "ntc/rng.hpp"
#include "ntc/scan.hpp"
#include "ntc/signaling.hpp"

namespace ntc {

constexpr int kCtuSize = 64;
constexpr int kMinBlock = 4;

// Sub-partition policy for non-split nodes of at least 8x8: none, encoder
// choice carried by a flag, or always (only the direction is coded).
enum class RectMode : uint8_t { off = 0, optional = 1, forced = 2 };

inline const char* rect_mode_name(RectMode m) {
  switch (m) {
    case RectMode::off: return "off";
    case RectMode::optional: return "optional";
    case RectMode::forced: return "forced";
  }
  throw error("bad rect mode value");
}

inline RectMode rect_mode_from_string(const std::string& s) {
  if (s == "off") return RectMode::off;
  if (s == "optional") return RectMode::optional;
  if (s == "forced") return RectMode::forced;
  throw error("unknown rect mode: " + s);
}

struct CodecConfig {
  int qp = 32;
  Scheme scheme = Scheme::default_pair;
  RectMode rect = RectMode::optional;
  bool nn = true;             // allow network predicted blocks
  bool full_mode_search = false;
};

// One network predicted block as the encoder saw it: normalized context, the
// normalized target, and the rate-distortion cost of every transform choice.
// costs[(l-1)*7 + k] covers matrix l pair k; cost0 is the identity choice.
struct BlockObservation {
  int net_h = 0, net_w = 0;
  std::vector<float> above, left, target;
  uint8_t i1 = 0, i2 = 0, qp = 0;
  double cost0 = 0;
  std::array<double, 14> costs{};
};

// Side channel the encoder fills while searching. Bank samples go through a
// per group reservoir so memory stays bounded over long image sequences.
struct Collector {
  bool want_obs = false;
  bool want_bank = false;
  size_t bank_cap = 0;  // 0 keeps everything
  std::vector<BlockObservation> obs;
  BankSamples bank;

  void offer_bank_sample(const GridD& coeffs, const PairSpec& spec) {
    if (!want_bank) return;
    GridD work = spec.transpose ? coeffs.transposed() : coeffs;
    const RegionFamily fam = region_family_for(work.rows, work.cols);
    const auto& scan = region_scan(fam);
    const int R = region_size(fam);
    std::vector<double> g(size_t(R), 0.0);
    for (int i = 0; i < R; ++i) g[size_t(i)] = work.at(scan[size_t(i)].r, scan[size_t(i)].c);
    auto& vec = bank.groups[size_t(spec.set)][size_t(fam)];
    uint64_t& n = seen_[size_t(spec.set)][size_t(fam)];
    ++n;
    if (bank_cap == 0 || vec.size() < bank_cap) {
      vec.push_back(std::move(g));
    } else {
      uint64_t j = rng_.below(n);
      if (j < bank_cap) vec[size_t(j)] = std::move(g);
    }
  }

private:
  std::array<std::array<uint64_t, 2>, kNumSets> seen_{};
  Rng rng_{0x243f6a8885a308d3ull};
};

struct EncodeStats {
  uint64_t leaf_blocks = 0;
  uint64_t nn_blocks = 0;
  uint64_t classic_blocks = 0;
  uint64_t lfnst_blocks = 0;
  uint64_t nn_lfnst_blocks = 0;
  uint64_t pair_coded_blocks = 0;  // blocks that spent bits on the pair
  uint64_t remainder_zero = 0;     // prediction scheme hits on the argmax

  void merge(const EncodeStats& o) {
    leaf_blocks += o.leaf_blocks;
    nn_blocks += o.nn_blocks;
    classic_blocks += o.classic_blocks;
    lfnst_blocks += o.lfnst_blocks;
    nn_lfnst_blocks += o.nn_lfnst_blocks;
    pair_coded_blocks += o.pair_coded_blocks;
    remainder_zero += o.remainder_zero;
  }
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  BitCounts counts;
  EncodeStats stats;
  Plane recon;
  double rd_cost = 0;
};

struct StreamHeader {
  int width = 0, height = 0, bitdepth = 8, qp = 32;
  Scheme scheme = Scheme::default_pair;
  RectMode rect = RectMode::off;
  uint64_t model_hash = 0, bank_hash = 0;
};

struct DecodeResult {
  Plane recon;
  StreamHeader header;
};

inline GridD block_of(const Plane& p, int y, int x, int h, int w) {
  GridD b(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) b.at(r, c) = double(p.at(y + r, x + c));
  return b;
}

inline GridD grid_sub(const GridD& a, const GridD& b) {
  GridD out(a.rows, a.cols);
  for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
  return out;
}

inline double grid_sse(const GridD& a, const GridD& b) {
  double s = 0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    double d = a.v[i] - b.v[i];
    s += d * d;
  }
  return s;
}

namespace detail {

struct TEval {
  GridI levels;
  GridD rec;
  double dist = 0;
  int coeff_bits = 0;
};

struct LeafOut {
  BitWriter bits;
  double dist = 0;
  EncodeStats stats;
};

struct NodeOut {
  double cost = 0;
  BitWriter bits;
  EncodeStats stats;
};

class Encoder {
public:
  Encoder(const Plane& orig, const CodecConfig& cfg, const ModelSet* models,
          const TransformBank& bank, Collector* col)
      : orig_(orig),
        cfg_(cfg),
        models_(cfg.nn ? models : nullptr),
        bank_(bank),
        col_(col),
        q_(cfg.qp),
        lambda_(rd_lambda(cfg.qp)),
        recon_(orig.width, orig.height, orig.bitdepth),
        mask_(orig.height, orig.width) {}

  NodeOut run() {
    NodeOut all;
    for (int cy = 0; cy < orig_.height; cy += kCtuSize)
      for (int cx = 0; cx < orig_.width; cx += kCtuSize) {
        NodeOut n = encode_node(cy, cx, kCtuSize);
        all.cost += n.cost;
        all.bits.append(n.bits);
        all.stats.merge(n.stats);
      }
    return all;
  }

  const Plane& recon() const { return recon_; }

private:
  struct Snapshot {
    int y, x, h, w;
    std::vector<sample_t> rec;
    std::vector<uint8_t> mask;
  };

  Snapshot save(int y, int x, int h, int w) const {
    Snapshot s{y, x, h, w, {}, {}};
    s.rec.reserve(size_t(h) * size_t(w));
    s.mask.reserve(size_t(h) * size_t(w));
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        s.rec.push_back(recon_.at(y + r, x + c));
        s.mask.push_back(mask_.at(y + r, x + c));
      }
    return s;
  }

  void restore(const Snapshot& s) {
    size_t i = 0;
    for (int r = 0; r < s.h; ++r)
      for (int c = 0; c < s.w; ++c, ++i) {
        recon_.at(s.y + r, s.x + c) = s.rec[i];
        mask_.at(s.y + r, s.x + c) = s.mask[i];
      }
  }

  std::vector<sample_t> copy_rect(int y, int x, int h, int w) const {
    std::vector<sample_t> out;
    out.reserve(size_t(h) * size_t(w));
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) out.push_back(recon_.at(y + r, x + c));
    return out;
  }

  NodeOut encode_node(int y, int x, int size) {
    const bool fits = y + size <= orig_.height && x + size <= orig_.width;
    if (!fits) {
      // boundary split is implied by geometry, no flag
      NodeOut out;
      const int hs = size / 2;
      for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) {
          const int ny = y + qy * hs, nx = x + qx * hs;
          if (ny >= orig_.height || nx >= orig_.width) continue;
          NodeOut c = encode_node(ny, nx, hs);
          out.cost += c.cost;
          out.bits.append(c.bits);
          out.stats.merge(c.stats);
        }
      return out;
    }

    const Snapshot snap = save(y, x, size, size);
    const bool rect_here = cfg_.rect != RectMode::off && size >= 2 * kMinBlock;
    const bool forced_rect = cfg_.rect == RectMode::forced && size >= 2 * kMinBlock;

    NodeOut best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<sample_t> best_rec;
    auto consider = [&](NodeOut&& cand) {
      if (cand.cost < best_cost) {
        best_cost = cand.cost;
        best = std::move(cand);
        best_rec = copy_rect(y, x, size, size);
      }
      restore(snap);
    };

    if (!forced_rect) {
      LeafOut le = encode_leaf(y, x, size, size);
      NodeOut cand;
      if (size > kMinBlock) cand.bits.put_bit(0, SyntaxCat::split_flag);
      if (cfg_.rect == RectMode::optional && size >= 2 * kMinBlock)
        cand.bits.put_bit(0, SyntaxCat::rect_flag);
      cand.bits.append(le.bits);
      cand.cost = le.dist + lambda_ * double(cand.bits.bit_count());
      cand.stats = le.stats;
      consider(std::move(cand));
    }

    if (rect_here) {
      for (int dir = 0; dir < 2; ++dir) {
        const int hh = dir == 0 ? size / 2 : size;
        const int ww = dir == 0 ? size : size / 2;
        LeafOut p1 = encode_leaf(y, x, hh, ww);
        LeafOut p2 =
            encode_leaf(y + (dir == 0 ? size / 2 : 0), x + (dir == 1 ? size / 2 : 0), hh, ww);
        NodeOut cand;
        if (size > kMinBlock) cand.bits.put_bit(0, SyntaxCat::split_flag);
        if (cfg_.rect == RectMode::optional) cand.bits.put_bit(1, SyntaxCat::rect_flag);
        cand.bits.put_bit(dir, SyntaxCat::rect_flag);
        cand.bits.append(p1.bits);
        cand.bits.append(p2.bits);
        cand.cost = p1.dist + p2.dist + lambda_ * double(cand.bits.bit_count());
        cand.stats = p1.stats;
        cand.stats.merge(p2.stats);
        consider(std::move(cand));
      }
    }

    if (size > kMinBlock) {
      NodeOut cand;
      cand.bits.put_bit(1, SyntaxCat::split_flag);
      cand.cost = lambda_;
      const int hs = size / 2;
      for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) {
          NodeOut ch = encode_node(y + qy * hs, x + qx * hs, hs);
          cand.cost += ch.cost;
          cand.bits.append(ch.bits);
          cand.stats.merge(ch.stats);
        }
      consider(std::move(cand));
    }

    size_t i = 0;
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c, ++i) {
        recon_.at(y + r, x + c) = best_rec[i];
        mask_.at(y + r, x + c) = 1;
      }
    return best;
  }

  TEval eval_transform(const GridD& orig_b, const GridD& pred, const GridD& coeffs, int lfnst,
                       const PairSpec& spec, RegionFamily fam) {
    TEval te;
    GridD c = lfnst ? secondary_forward(coeffs, spec, bank_.matrix(spec.set, fam, lfnst))
                    : coeffs;
    te.levels = quantize_grid(c, q_);
    te.coeff_bits = count_coefficient_bits(te.levels);
    GridD dq = dequantize_grid(te.levels, q_);
    if (lfnst) dq = secondary_inverse(dq, spec, bank_.matrix(spec.set, fam, lfnst));
    GridD res = inverse_dct2(dq);
    te.rec = GridD(orig_b.rows, orig_b.cols);
    for (size_t i = 0; i < te.rec.v.size(); ++i) {
      te.rec.v[i] = double(clip_sample(pred.v[i] + res.v[i], orig_.bitdepth));
      const double d = te.rec.v[i] - orig_b.v[i];
      te.dist += d * d;
    }
    return te;
  }

  static bool scheme_allows(Scheme s, int pair, int predicted) {
    switch (s) {
      case Scheme::default_pair: return pair == 0;
      case Scheme::inference: return pair == predicted;
      case Scheme::fully_explicit:
      case Scheme::prediction: return true;
    }
    throw error("bad scheme value");
  }

  void record_observation(const NnPrediction& nn, const GridD& orig_b, const TEval& te0,
                          const std::array<std::array<double, 7>, 2>& gcost) {
    BlockObservation o;
    o.net_h = nn.geo.net_h;
    o.net_w = nn.geo.net_w;
    o.above.assign(nn.net_above.v.begin(), nn.net_above.v.end());
    o.left.assign(nn.net_left.v.begin(), nn.net_left.v.end());
    GridD tgt = adapt_target(orig_b, nn.geo, nn.mu, orig_.bitdepth);
    o.target.assign(tgt.v.begin(), tgt.v.end());
    o.qp = uint8_t(cfg_.qp);
    o.cost0 = te0.dist + lambda_ * double(te0.coeff_bits + 1);
    for (int l = 1; l <= 2; ++l) {
      int arg = 0;
      for (int k = 0; k < kNumPairs; ++k) {
        o.costs[size_t((l - 1) * kNumPairs + k)] = gcost[size_t(l - 1)][size_t(k)];
        if (gcost[size_t(l - 1)][size_t(k)] < gcost[size_t(l - 1)][size_t(arg)]) arg = k;
      }
      (l == 1 ? o.i1 : o.i2) = uint8_t(arg);
    }
    col_->obs.push_back(std::move(o));
  }

  LeafOut encode_leaf(int y, int x, int h, int w) {
    const GridD orig_b = block_of(orig_, y, x, h, w);
    const RegionFamily fam = region_family_for(h, w);

    struct Best {
      double cost = std::numeric_limits<double>::infinity();
      bool is_nn = false;
      int mode = 0, lfnst = 0, pair = 0, bits = 0;
      TEval te;
    } best;

    const IntraRefs refs = build_refs(recon_, mask_, y, x, h, w);
    for (int mode : classic_search_modes(cfg_.full_mode_search)) {
      const int eff = wide_angle_remap(mode, h, w);
      const GridD pred = predict_classic(refs, eff, h, w, orig_.bitdepth);
      const GridD coeffs = forward_dct2(grid_sub(orig_b, pred));
      const PairSpec spec = pair_index_to_spec(mode_to_pair(eff));
      if (col_) col_->offer_bank_sample(coeffs, spec);
      for (int l = 0; l <= 2; ++l) {
        TEval te = eval_transform(orig_b, pred, coeffs, l, spec, fam);
        const int bits = 1 + 7 + lfnst_idx_bits(l) + te.coeff_bits;
        const double cost = te.dist + lambda_ * double(bits);
        if (cost < best.cost) best = {cost, false, mode, l, 0, bits, std::move(te)};
      }
    }

    std::optional<NnPrediction> nn;
    if (models_) nn = predict_nn(recon_, mask_, y, x, h, w, *models_);
    std::array<int, 2> predicted{0, 0};
    if (nn) {
      predicted = {head_argmax(nn->logits, 1), head_argmax(nn->logits, 2)};
      const GridD coeffs = forward_dct2(grid_sub(orig_b, nn->pred));
      const TEval te0 = eval_transform(orig_b, nn->pred, coeffs, 0, PairSpec{0, false}, fam);
      {
        const int bits = 1 + lfnst_idx_bits(0) + te0.coeff_bits;
        const double cost = te0.dist + lambda_ * double(bits);
        if (cost < best.cost) best = {cost, true, 0, 0, 0, bits, TEval(te0)};
      }
      const bool want_obs = col_ && col_->want_obs;
      std::array<std::array<double, 7>, 2> gcost{};
      for (int l = 1; l <= 2; ++l)
        for (int k = 0; k < kNumPairs; ++k) {
          const bool allowed = scheme_allows(cfg_.scheme, k, predicted[size_t(l - 1)]);
          if (!allowed && !want_obs) continue;
          TEval te =
              eval_transform(orig_b, nn->pred, coeffs, l, applied_pair_spec(k, nn->geo), fam);
          if (want_obs)
            gcost[size_t(l - 1)][size_t(k)] = te.dist + lambda_ * double(te.coeff_bits + 2);
          if (!allowed) continue;
          const int pb = pair_bits(cfg_.scheme, k, predicted[size_t(l - 1)]);
          const int bits = 1 + 2 + pb + te.coeff_bits;
          const double cost = te.dist + lambda_ * double(bits);
          if (cost < best.cost) best = {cost, true, 0, l, k, bits, std::move(te)};
        }
      if (want_obs) record_observation(*nn, orig_b, te0, gcost);
    }

    LeafOut out;
    out.dist = best.te.dist;
    out.bits.put_bit(best.is_nn ? 1 : 0, SyntaxCat::mode_flag);
    if (!best.is_nn) out.bits.put_bits(uint64_t(best.mode), 7, SyntaxCat::classic_mode);
    write_lfnst_idx(out.bits, best.lfnst);
    if (best.is_nn && best.lfnst > 0)
      write_pair(out.bits, cfg_.scheme, best.pair, predicted[size_t(best.lfnst - 1)]);
    code_coefficients(best.te.levels, out.bits);
    if (int(out.bits.bit_count()) != best.bits) throw error("leaf bit accounting mismatch");

    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        recon_.at(y + r, x + c) = sample_t(best.te.rec.at(r, c));
        mask_.at(y + r, x + c) = 1;
      }

    out.stats.leaf_blocks = 1;
    (best.is_nn ? out.stats.nn_blocks : out.stats.classic_blocks) = 1;
    if (best.lfnst > 0) {
      out.stats.lfnst_blocks = 1;
      if (best.is_nn) {
        out.stats.nn_lfnst_blocks = 1;
        if (cfg_.scheme == Scheme::fully_explicit || cfg_.scheme == Scheme::prediction)
          out.stats.pair_coded_blocks = 1;
        if (cfg_.scheme == Scheme::prediction && best.pair == predicted[size_t(best.lfnst - 1)])
          out.stats.remainder_zero = 1;
      }
    }
    return out;
  }

  const Plane& orig_;
  CodecConfig cfg_;
  const ModelSet* models_;
  const TransformBank& bank_;
  Collector* col_;
  Quantizer q_;
  double lambda_;
  Plane recon_;
  GridU8 mask_;
};

class Decoder {
public:
  Decoder(const StreamHeader& hdr, const ModelSet* models, const TransformBank& bank,
          BitReader& br)
      : hdr_(hdr),
        models_(models),
        bank_(bank),
        br_(br),
        q_(hdr.qp),
        recon_(hdr.width, hdr.height, hdr.bitdepth),
        mask_(hdr.height, hdr.width) {}

  Plane run() {
    for (int cy = 0; cy < recon_.height; cy += kCtuSize)
      for (int cx = 0; cx < recon_.width; cx += kCtuSize) decode_node(cy, cx, kCtuSize);
    return std::move(recon_);
  }

private:
  void decode_node(int y, int x, int size) {
    const bool fits = y + size <= recon_.height && x + size <= recon_.width;
    const int hs = size / 2;
    if (!fits) {
      for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) {
          const int ny = y + qy * hs, nx = x + qx * hs;
          if (ny >= recon_.height || nx >= recon_.width) continue;
          decode_node(ny, nx, hs);
        }
      return;
    }
    int split = 0;
    if (size > kMinBlock) {
      br_.set_element("split_flag");
      split = br_.get_bit();
    }
    if (split) {
      for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) decode_node(y + qy * hs, x + qx * hs, hs);
      return;
    }
    if (hdr_.rect != RectMode::off && size >= 2 * kMinBlock) {
      br_.set_element("rect_flag");
      const int use_rect = hdr_.rect == RectMode::forced ? 1 : br_.get_bit();
      if (use_rect) {
        br_.set_element("rect_flag");
        const int dir = br_.get_bit();
        const int hh = dir == 0 ? hs : size;
        const int ww = dir == 0 ? size : hs;
        decode_leaf(y, x, hh, ww);
        decode_leaf(y + (dir == 0 ? hs : 0), x + (dir == 1 ? hs : 0), hh, ww);
        return;
      }
    }
    decode_leaf(y, x, size, size);
  }

  void decode_leaf(int y, int x, int h, int w) {
    br_.set_element("mode_flag");
    const int is_nn = br_.get_bit();
    GridD pred;
    std::optional<NnPrediction> nn;
    int eff = 0;
    if (is_nn) {
      if (!models_) throw bitstream_error("nn_block_without_models", br_.bit_pos());
      nn = predict_nn(recon_, mask_, y, x, h, w, *models_);
      if (!nn) throw bitstream_error("nn_block_unsupported_size", br_.bit_pos());
      pred = std::move(nn->pred);
    } else {
      br_.set_element("classic_mode");
      const int mode = int(br_.get_bits(7));
      if (mode > 66) throw bitstream_error("classic_mode", br_.bit_pos());
      eff = wide_angle_remap(mode, h, w);
      pred = predict_classic(build_refs(recon_, mask_, y, x, h, w), eff, h, w, recon_.bitdepth);
    }
    const int lfnst = read_lfnst_idx(br_);
    PairSpec spec{0, false};
    if (lfnst > 0) {
      if (is_nn) {
        const int k = read_pair(br_, hdr_.scheme, head_argmax(nn->logits, lfnst));
        spec = applied_pair_spec(k, nn->geo);
      } else {
        spec = pair_index_to_spec(mode_to_pair(eff));
      }
    }
    const GridI levels = decode_coefficients(br_, h, w);
    GridD dq = dequantize_grid(levels, q_);
    if (lfnst)
      dq = secondary_inverse(dq, spec, bank_.matrix(spec.set, region_family_for(h, w), lfnst));
    const GridD res = inverse_dct2(dq);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        recon_.at(y + r, x + c) =
            sample_t(clip_sample(pred.at(r, c) + res.at(r, c), recon_.bitdepth));
        mask_.at(y + r, x + c) = 1;
      }
  }

  StreamHeader hdr_;
  const ModelSet* models_;
  const TransformBank& bank_;
  BitReader& br_;
  Quantizer q_;
  Plane recon_;
  GridU8 mask_;
};

}  // namespace detail

inline void write_header(BitWriter& bw, const Plane& img, const CodecConfig& cfg,
                         uint64_t model_hash, uint64_t bank_hash) {
  for (char ch : {'N', 'T', 'C', '1'}) bw.put_bits(uint64_t(uint8_t(ch)), 8, SyntaxCat::header);
  bw.put_bits(1, 8, SyntaxCat::header);  // version
  bw.put_bits(uint64_t(img.width), 16, SyntaxCat::header);
  bw.put_bits(uint64_t(img.height), 16, SyntaxCat::header);
  bw.put_bits(uint64_t(img.bitdepth), 8, SyntaxCat::header);
  bw.put_bits(uint64_t(cfg.qp), 8, SyntaxCat::header);
  bw.put_bits(uint64_t(cfg.scheme), 8, SyntaxCat::header);
  bw.put_bits(uint64_t(cfg.rect), 8, SyntaxCat::header);
  bw.put_bits(model_hash, 64, SyntaxCat::header);
  bw.put_bits(bank_hash, 64, SyntaxCat::header);
}

inline StreamHeader read_header(BitReader& br) {
  br.set_element("header");
  for (char ch : {'N', 'T', 'C', '1'})
    if (br.get_bits(8) != uint64_t(uint8_t(ch))) throw bitstream_error("magic", br.bit_pos());
  if (br.get_bits(8) != 1) throw bitstream_error("version", br.bit_pos());
  StreamHeader h;
  h.width = int(br.get_bits(16));
  h.height = int(br.get_bits(16));
  h.bitdepth = int(br.get_bits(8));
  h.qp = int(br.get_bits(8));
  const int scheme = int(br.get_bits(8));
  const int rect = int(br.get_bits(8));
  h.model_hash = br.get_bits(64);
  h.bank_hash = br.get_bits(64);
  if (h.width <= 0 || h.height <= 0 || h.width % kMinBlock || h.height % kMinBlock)
    throw bitstream_error("dimensions", br.bit_pos());
  if (h.bitdepth < 8 || h.bitdepth > 16) throw bitstream_error("bitdepth", br.bit_pos());
  if (h.qp < 0 || h.qp > 51) throw bitstream_error("qp", br.bit_pos());
  if (scheme > 3) throw bitstream_error("scheme", br.bit_pos());
  if (rect > 2) throw bitstream_error("rect_mode", br.bit_pos());
  h.scheme = Scheme(scheme);
  h.rect = RectMode(rect);
  return h;
}

inline EncodeResult encode_image(const Plane& orig, const CodecConfig& cfg,
                                 const ModelSet* models, const TransformBank& bank,
                                 uint64_t model_hash = 0, uint64_t bank_hash = 0,
                                 Collector* col = nullptr) {
  if (orig.width <= 0 || orig.height <= 0) throw error("empty image");
  if (orig.width % kMinBlock || orig.height % kMinBlock)
    throw error("image dimensions must be multiples of " + std::to_string(kMinBlock));
  if (orig.width > 0xffff || orig.height > 0xffff) throw error("image too large for header");
  if (orig.bitdepth < 8 || orig.bitdepth > 16) throw error("unsupported bit depth");
  if (cfg.qp < 0 || cfg.qp > 51) throw error("qp out of range");
  if (cfg.nn && models == nullptr)
    throw error("network predicted blocks enabled but no models given");

  detail::Encoder enc(orig, cfg, models, bank, col);
  detail::NodeOut body = enc.run();
  BitWriter bw;
  write_header(bw, orig, cfg, model_hash, bank_hash);
  const double cost = body.cost + rd_lambda(cfg.qp) * double(bw.bit_count());
  bw.append(body.bits);
  while (bw.bit_count() % 8) bw.put_bit(0, SyntaxCat::header);
  EncodeResult r;
  r.bytes = bw.bytes();
  r.counts = bw.counts();
  r.stats = body.stats;
  r.recon = enc.recon();
  r.rd_cost = cost;
  return r;
}

inline DecodeResult decode_image(std::span<const uint8_t> bytes, const ModelSet* models,
                                 const TransformBank& bank, uint64_t expect_model_hash = 0,
                                 uint64_t expect_bank_hash = 0) {
  BitReader br(bytes);
  StreamHeader hdr = read_header(br);
  if (expect_model_hash && hdr.model_hash && hdr.model_hash != expect_model_hash)
    throw error("model hash mismatch between stream and loaded models");
  if (expect_bank_hash && hdr.bank_hash && hdr.bank_hash != expect_bank_hash)
    throw error("bank hash mismatch between stream and loaded bank");
  detail::Decoder dec(hdr, models, bank, br);
  DecodeResult out;
  out.recon = dec.run();
  out.header = hdr;
  return out;
}

}  // namespace ntc
