#pragma once

#include <map>
#include <string>
#include <vector>

#include "spectral_hull/hull.hpp"
#include "spectral_hull/sampling.hpp"
#include "spectral_hull/spectral_measure.hpp"

namespace spectral_hull {

// Bit-exact double text: C99 hex-float ("%a").
std::string hexfloat(double x);
double parse_hexfloat(const std::string& s);

// Raw little-endian doubles, base64.
std::string base64_encode_doubles(const std::vector<double>& v);
std::vector<double> base64_decode_doubles(const std::string& s);

// Decimal with 17 significant digits (round-trips doubles).
std::string fmt17(double x);

json sampling_to_json(const Sampling& s, const Scale& sc);
SamplingAndScale sampling_from_json(const json& j);

json measure_to_json(const SpectralAtomMeasure& m, const std::map<std::string, EmbeddedVec>& vectors = {});

json hull_to_json(const HullSpace& h, const std::vector<ChartPoint>& chart = {});

}  // namespace spectral_hull
