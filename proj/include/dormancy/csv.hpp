#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dormancy/particles.hpp"
#include "dormancy/pde.hpp"
#include "dormancy/wavespeed.hpp"

namespace dormancy {

inline constexpr std::string_view kVersion = "0.1.0";

/// 12 significant digits, dot decimal separator regardless of locale.
std::string format_number(double value);

/// Comment lines written above the column header of every CSV.
struct CsvHeader {
  std::string config;                 ///< key=value echo of the run
  std::optional<std::uint64_t> seed;  ///< omitted for deterministic outputs
};

/// Minimal CSV emitter: comment header, column line, numeric rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const CsvHeader& header, std::initializer_list<std::string_view> columns);

  /// Leading text cells followed by numbers.
  void row(std::initializer_list<double> values);
  void row(std::string_view label, std::initializer_list<double> values);
  void row(std::span<const double> values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

void write_sweep(std::ostream& out, const CsvHeader& header, SweepAxis axis,
                 std::span<const SweepRow> rows);
void write_front_trace(std::ostream& out, const CsvHeader& header, const FrontTrace& trace);
void write_field(std::ostream& out, const CsvHeader& header, const FieldPair& field);
void write_rightmost(std::ostream& out, const CsvHeader& header, const RightmostStat& stat);
void write_cdf(std::ostream& out, const CsvHeader& header, std::span<const CdfPoint> cdf);

/// Opens `path` for writing (parent directories are created). Throws
/// std::runtime_error when the file cannot be opened.
class OutputFile {
 public:
  explicit OutputFile(const std::filesystem::path& path);
  std::ostream& stream() noexcept { return stream_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream stream_;
};

}  // namespace dormancy
