#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavesim/wrappers.hpp"

namespace wavesim {

// One (step, vehicle) record: state at the start of the step plus the
// acceleration applied over it and the resulting fuel rate.
struct TraceRow {
  double t;
  int veh_id;
  bool is_av;
  double pos;
  double speed;
  double accel;
  double gap;   // NaN for the trajectory leader
  double fuel;  // [g/s]
  WrapperFlag flag;
};

struct SimulationTrace {
  double dt = 0.1;
  std::vector<TraceRow> rows;
  std::size_t steps = 0;
  bool aborted = false;
  std::string abort_reason;
  std::size_t lane_change_events = 0;

  // Distance covered over a row's step: (v + a dt) dt.
  double row_distance(const TraceRow& row) const;
};

inline constexpr const char* kTraceCsvHeader =
    "t,veh_id,is_av,pos_m,speed_mps,accel_mps2,gap_m,fuel_gps,wrapper_flag";

void write_trace_csv(std::ostream& os, const SimulationTrace& trace);
SimulationTrace read_trace_csv(std::istream& is);

// Shortest round-trip decimal representation; "nan"/"inf" for non-finite.
std::string format_double(double x);

}  // namespace wavesim
