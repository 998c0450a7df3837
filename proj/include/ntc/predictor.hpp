#pragma once

#include <optional>

#include "ntc/common.hpp"
#include "ntc/context.hpp"
#include "ntc/lfnst.hpp"
#include "ntc/model_io.hpp"
#include "ntc/net.hpp"
#include "ntc/signaling.hpp"

namespace ntc {

struct NnPrediction {
  GridD pred;           // h x w, integer valued samples
  LogitVector logits;   // scored in the adapted (network) orientation
  GeoAdapt geo;
  double mu = 0;
  GridD net_above, net_left;  // normalized context as the network saw it
};

// Logits and pair indices live in the network orientation. When the context
// was transposed on the way in, the chosen pair's transpose bit flips on the
// way back out so the geometric meaning of the selection survives.
inline PairSpec applied_pair_spec(int pair_idx, const GeoAdapt& geo) {
  PairSpec s = pair_index_to_spec(pair_idx);
  if (geo.transpose) s.transpose = !s.transpose;
  return s;
}

inline std::optional<NnPrediction> predict_nn(const Plane& recon, const GridU8& decoded, int y,
                                              int x, int h, int w, const ModelSet& models) {
  auto geo = geo_adapt(h, w);
  if (!geo) return std::nullopt;
  BlockContext ctx = extract_context(recon, decoded, y, x, h, w);
  NetInput in = adapt_context(ctx, *geo, h, w, recon.bitdepth);
  const Model& m = models.at(geo->net_h, geo->net_w);
  GridD pred_net;
  NnPrediction out;
  forward_single(m, in.above, in.left, pred_net, out.logits);
  out.pred = postprocess_prediction(pred_net, *geo, in.mu, recon.bitdepth);
  out.geo = *geo;
  out.mu = in.mu;
  out.net_above = std::move(in.above);
  out.net_left = std::move(in.left);
  return out;
}

}  // namespace ntc
