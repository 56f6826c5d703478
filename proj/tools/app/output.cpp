#include "app/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace radtrans::app {

namespace {

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void put_row(std::ostream& out, double x, double y, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y, v);
  out << buf;
}

}  // namespace

void write_csv(std::ostream& out, const ScalarField& field) {
  const CartesianGrid& grid = field.grid();
  out << "x,y,value\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      put_row(out, grid.coordinate(i), grid.coordinate(j), field(i, j));
    }
  }
}

void write_csv(const std::filesystem::path& path, const ScalarField& field) {
  auto out = open_output(path);
  write_csv(out, field);
}

void write_csv(const std::filesystem::path& path, const PolarField& field) {
  auto out = open_output(path);
  const PolarGrid& grid = field.grid();
  out << "x,y,value\n";
  for (std::size_t i = 0; i < grid.radial_count(); ++i) {
    for (std::size_t j = 0; j < grid.angular_count(); ++j) {
      const Vec2 x = grid.node(i, j);
      put_row(out, x.x, x.y, field(i, j));
    }
  }
}

ValueRange write_pgm(const std::filesystem::path& path, const ScalarField& field) {
  const CartesianGrid& grid = field.grid();
  const auto values = field.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const ValueRange range{*lo, *hi};
  const double span = range.max - range.min;

  std::vector<unsigned char> pixels;
  pixels.reserve(grid.node_count());
  for (std::size_t row = 0; row < grid.size(); ++row) {
    const std::size_t j = grid.size() - 1 - row;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = span > 0.0 ? (field(i, j) - range.min) / span : 0.0;
      pixels.push_back(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0)));
    }
  }
  auto out = open_output(path, std::ios::binary);
  out << "P5\n" << grid.size() << " " << grid.size() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  return range;
}

void write_image(const std::filesystem::path& pgm_path, const ScalarField& field) {
  const ValueRange range = write_pgm(pgm_path, field);
  auto path = pgm_path;
  path.replace_extension(".range.txt");
  auto out = open_output(path);
  char buf[96];
  std::snprintf(buf, sizeof buf, "min = %.17g\nmax = %.17g\n", range.min, range.max);
  out << buf;
}

const char* monotone_label(const IterationRecord& record) {
  if (record.monotone_up && record.monotone_down) return "flat";
  if (record.monotone_up) return "up";
  if (record.monotone_down) return "down";
  return "none";
}

void write_log(std::ostream& out, const IterationReport& report) {
  out << "# iter residual tmin tmax monotone wall_ms\n";
  char buf[160];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, "%d %.6e %.9g %.9g %s %.3f\n", r.iter, r.residual, r.tmin,
                  r.tmax, monotone_label(r), r.wall_ms);
    out << buf;
  }
}

}  // namespace radtrans::app
