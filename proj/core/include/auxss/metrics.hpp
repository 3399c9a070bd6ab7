#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "auxss/training.hpp"

namespace auxss {

// step,episode,ep_len,ep_return,cause,id_success,ood_success,id_return,ood_return
// Episode columns are empty on the initial checkpoint row; eval columns are
// empty on rows without a checkpoint.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows);

// Checkpoint ordinals are recovered from row order. Throws ParseError.
std::vector<MetricsRow> read_metrics(std::istream& in);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

std::vector<EvalReport> checkpoints(const std::vector<MetricsRow>& rows);

}  // namespace auxss
