#pragma once

namespace wavesim::units {

inline constexpr double kMphToMps = 0.44704;
inline constexpr double kMetersPerMile = 1609.344;
// Gasoline mass per US gallon (0.745 kg/L * 3.785411784 L/gal).
inline constexpr double kGramsPerGallon = 745.0 * 3.785411784;

constexpr double mph_to_mps(double mph) { return mph * kMphToMps; }
constexpr double mps_to_mph(double mps) { return mps / kMphToMps; }

}  // namespace wavesim::units
