#include "wavesim/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "wavesim/errors.hpp"

namespace wavesim {

double SimulationTrace::row_distance(const TraceRow& row) const {
  return (row.speed + row.accel * dt) * dt;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace.rows) {
    os << format_double(r.t) << ',' << r.veh_id << ',' << (r.is_av ? 1 : 0) << ','
       << format_double(r.pos) << ',' << format_double(r.speed) << ','
       << format_double(r.accel) << ',' << format_double(r.gap) << ','
       << format_double(r.fuel) << ',' << static_cast<int>(r.flag) << '\n';
  }
}

namespace {

double parse_field(const std::string& s, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ConfigError("trace CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

SimulationTrace read_trace_csv(std::istream& is) {
  SimulationTrace trace;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trace CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader) throw ConfigError("trace CSV header mismatch");
  int line_no = 1;
  std::string fields[9];
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t start = 0;
    int n = 0;
    for (; n < 9; ++n) {
      const auto comma = line.find(',', start);
      fields[n] = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                : comma - start);
      if (comma == std::string::npos) {
        ++n;
        break;
      }
      start = comma + 1;
    }
    if (n != 9) {
      throw ConfigError("trace CSV line " + std::to_string(line_no) + ": expected 9 fields");
    }
    TraceRow r{};
    r.t = parse_field(fields[0], line_no);
    r.veh_id = static_cast<int>(parse_field(fields[1], line_no));
    r.is_av = parse_field(fields[2], line_no) != 0.0;
    r.pos = parse_field(fields[3], line_no);
    r.speed = parse_field(fields[4], line_no);
    r.accel = parse_field(fields[5], line_no);
    r.gap = parse_field(fields[6], line_no);
    r.fuel = parse_field(fields[7], line_no);
    r.flag = static_cast<WrapperFlag>(static_cast<int>(parse_field(fields[8], line_no)));
    trace.rows.push_back(r);
  }
  // Recover dt and step count from the distinct timestamps.
  std::size_t steps = 0;
  double first_t = 0.0, second_t = 0.0;
  bool have_second = false;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    if (i == 0 || trace.rows[i].t != trace.rows[i - 1].t) {
      if (steps == 0) first_t = trace.rows[i].t;
      if (steps == 1) {
        second_t = trace.rows[i].t;
        have_second = true;
      }
      ++steps;
    }
  }
  trace.steps = steps;
  if (have_second) trace.dt = second_t - first_t;
  // Timestamps are k * dt, so round to the nearest clean step.
  trace.dt = std::round(trace.dt * 1e9) / 1e9;
  return trace;
}

}  // namespace wavesim
