#include "chargegrid/events.hpp"

namespace chargegrid {

AxisSummary summarize_axis(const std::vector<Road>& roads, double span) {
  AxisSummary s;
  for (const Road& r : roads) {
    if (r.offset < 0.0) {
      s.first_negative = r;  // ascending order, so the last negative one wins
      continue;
    }
    if (r.offset < span) (r.charging ? s.charging_in_span : s.noncharging_in_span)++;
    if (r.offset > span && !s.first_beyond) s.first_beyond = r;
    auto& slot = r.charging ? s.nearest_c : s.nearest_nc;
    if (!slot) slot = r.offset;
  }
  return s;
}

EventContext classify_event(const RoadRealization& r) {
  EventContext ctx;
  ctx.event = event_for(r.geometry.orientation, r.source_charging, r.dest_charging);
  AxisSummary h = summarize_axis(r.h_roads, r.geometry.d_v);
  AxisSummary v = summarize_axis(r.v_roads, r.geometry.d_h);
  ctx.d_nhc = h.nearest_c;
  ctx.d_nhnc = h.nearest_nc;
  ctx.d_nvc = v.nearest_c;
  ctx.d_nvnc = v.nearest_nc;
  if (h.first_negative) ctx.d_l = -h.first_negative->offset;
  if (h.nearest_c && h.nearest_nc && *h.nearest_nc < *h.nearest_c && *h.nearest_c < r.geometry.d_v)
    ctx.x2 = *h.nearest_c - *h.nearest_nc;
  if (v.nearest_c && v.nearest_nc && *v.nearest_nc < *v.nearest_c && *v.nearest_c < r.geometry.d_h)
    ctx.x1 = *v.nearest_c - *v.nearest_nc;
  return ctx;
}

}  // namespace chargegrid
