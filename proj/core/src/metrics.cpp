#include "auxss/metrics.hpp"

#include <fstream>
#include <string>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"
#include "auxss/format.hpp"

namespace auxss {

namespace {

constexpr const char* kHeader = "step,episode,ep_len,ep_return,cause,id_success,ood_success,id_return,ood_return";

}  // namespace

void write_metrics_header(std::ostream& out) { out << kHeader << '\n'; }

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  out << row.step << ',' << row.episode << ',';
  if (row.result) {
    out << row.result->length << ',' << format_real(row.result->undiscounted_return) << ','
        << to_string(row.result->cause);
  } else {
    out << ",,";
  }
  out << ',';
  if (row.eval) {
    out << format_real(row.eval->id_success) << ',' << format_real(row.eval->ood_success) << ','
        << format_real(row.eval->id_return) << ',' << format_real(row.eval->ood_return);
  } else {
    out << ",,,";
  }
  out << '\n';
}

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  write_metrics_header(out);
  for (const auto& r : rows) write_metrics_row(out, r);
}

std::vector<MetricsRow> read_metrics(std::istream& in) {
  std::vector<MetricsRow> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty metrics file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (trim(line) != kHeader) throw ParseError(line_no, "unexpected metrics header");
  int checkpoint = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 9) throw ParseError(line_no, "expected 9 columns, found " + std::to_string(cols.size()));
    try {
      MetricsRow row;
      row.step = parse_int(cols[0]);
      row.episode = parse_int(cols[1]);
      if (!trim(cols[2]).empty()) {
        EpisodeResult r;
        r.length = static_cast<int>(parse_int(cols[2]));
        r.undiscounted_return = parse_double(cols[3]);
        const auto cause = cause_from_string(trim(cols[4]));
        if (!cause) throw ConfigError("unknown cause '" + trim(cols[4]) + "'");
        r.cause = *cause;
        row.result = r;
      }
      if (!trim(cols[5]).empty()) {
        EvalReport e;
        e.checkpoint = checkpoint++;
        e.step = row.step;
        e.id_success = parse_double(cols[5]);
        e.ood_success = parse_double(cols[6]);
        e.id_return = parse_double(cols[7]);
        e.ood_return = parse_double(cols[8]);
        row.eval = e;
      }
      rows.push_back(row);
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return rows;
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file " + path.string());
  return read_metrics(in);
}

std::vector<EvalReport> checkpoints(const std::vector<MetricsRow>& rows) {
  std::vector<EvalReport> out;
  for (const auto& r : rows)
    if (r.eval) out.push_back(*r.eval);
  return out;
}

}  // namespace auxss
