#pragma once

#include <filesystem>
#include <ostream>

#include "radtrans/diffusion.hpp"
#include "radtrans/field.hpp"
#include "radtrans/solver.hpp"

namespace radtrans::app {

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
};

/// Header x,y,value then one row per node, j outer and i inner, %.17g.
void write_csv(std::ostream& out, const ScalarField& field);
void write_csv(const std::filesystem::path& path, const ScalarField& field);
/// Polar nodes in Cartesian coordinates, ring by ring.
void write_csv(const std::filesystem::path& path, const PolarField& field);

/// Binary 8-bit PGM, top row at y = +L. Returns the range mapped onto 0..255.
ValueRange write_pgm(const std::filesystem::path& path, const ScalarField& field);
/// PGM plus a "<stem>.range.txt" sidecar holding the range.
void write_image(const std::filesystem::path& pgm_path, const ScalarField& field);

/// "iter residual tmin tmax monotone wall_ms", one line per iteration.
void write_log(std::ostream& out, const IterationReport& report);

/// "up", "down", "flat" or "none" for one iteration record.
const char* monotone_label(const IterationRecord& record);

}  // namespace radtrans::app
