#include "dormancy/csv.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace dormancy {

std::string format_number(double value) { return fmt::format("{:.12g}", value); }

CsvWriter::CsvWriter(std::ostream& out, const CsvHeader& header,
                     std::initializer_list<std::string_view> columns)
    : out_(out), columns_(columns.size()) {
  out_ << "# dormancy " << kVersion << '\n';
  if (!header.config.empty()) out_ << "# config: " << header.config << '\n';
  if (header.seed) out_ << "# seed: " << *header.seed << '\n';
  bool first = true;
  for (auto c : columns) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_number(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::row(std::string_view label, std::initializer_list<double> values) {
  if (values.size() + 1 != columns_) throw std::logic_error("csv row width mismatch");
  out_ << label;
  for (double v : values) out_ << ',' << format_number(v);
  out_ << '\n';
}

void write_sweep(std::ostream& out, const CsvHeader& header, SweepAxis axis,
                 std::span<const SweepRow> rows) {
  CsvWriter csv(out, header,
                {"axis", "value", "lambda_classical", "lambda_seedbank", "lambda_spore", "mu_classical",
                 "mu_seedbank", "mu_spore"});
  for (const auto& r : rows)
    csv.row(to_string(axis), {r.value, r.lambda_star[0], r.lambda_star[1], r.lambda_star[2], r.mu_star[0],
                              r.mu_star[1], r.mu_star[2]});
}

void write_front_trace(std::ostream& out, const CsvHeader& header, const FrontTrace& trace) {
  CsvWriter csv(out, header, {"t", "front_x"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) csv.row({trace.times[i], trace.positions[i]});
}

void write_field(std::ostream& out, const CsvHeader& header, const FieldPair& field) {
  CsvWriter csv(out, header, {"x", "u", "v"});
  for (std::size_t i = 0; i < field.grid.n; ++i) csv.row({field.grid.x(i), field.u[i], field.v[i]});
}

void write_rightmost(std::ostream& out, const CsvHeader& header, const RightmostStat& stat) {
  CsvWriter csv(out, header, {"replicate", "R_T"});
  for (std::size_t r = 0; r < stat.samples.size(); ++r) csv.row({static_cast<double>(r), stat.samples[r]});
}

void write_cdf(std::ostream& out, const CsvHeader& header, std::span<const CdfPoint> cdf) {
  CsvWriter csv(out, header, {"x", "p_hat", "stderr"});
  for (const auto& p : cdf) csv.row({p.x, p.p_hat, p.std_error});
}

OutputFile::OutputFile(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  stream_.open(path);
  if (!stream_) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
}

}  // namespace dormancy
