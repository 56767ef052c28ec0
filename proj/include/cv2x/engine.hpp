#pragma once
#include <functional>
#include <vector>

#include "cv2x/channel.hpp"
#include "cv2x/hil.hpp"
#include "cv2x/metrics.hpp"
#include "cv2x/mobility.hpp"
#include "cv2x/params.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/sbsps.hpp"

namespace cv2x {

// A generated safety message: the unit of the event queue. Queue order is
// (gen_time_ms, tx_id), so equal timestamps resolve deterministically.
struct BsmEvent {
  int64_t gen_time_ms = 0;
  int tx_id = 0;
  int64_t seq = 0;
  TraceRecord snapshot;  // transmitter state at generation time
};

struct EngineInputs {
  SimParams sim;
  ChannelModelConfig channel;
  BlerTable bler;
  std::vector<Track> tracks;
  int hv_id = 0;
};

// Observation points; all invoked in deterministic order. on_decoded fires
// for every packet the host vehicle decodes, in reception order.
struct EngineHooks {
  std::function<void(const EmittedBsm&)> on_decoded;
  std::function<void(int tx_id, const Csr& csr, int64_t gen_time_ms)>
      on_transmission;
  std::function<void(int tx_id, int64_t gen_time_ms)> on_selection;
};

MetricsReport run_engine(const EngineInputs& inputs,
                         const EngineHooks& hooks = {});

}  // namespace cv2x
