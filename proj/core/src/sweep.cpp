#include "auxss/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "auxss/errors.hpp"
#include "auxss/format.hpp"
#include "auxss/metrics.hpp"

namespace auxss {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SweepResult sweep(const std::vector<RunConfig>& configs, const SweepOptions& options) {
  if (options.n_seeds < 1) throw ConfigError("sweep needs at least one seed");
  if (options.parallelism < 1) throw ConfigError("sweep parallelism must be >= 1");
  std::set<std::string> labels;
  for (const auto& c : configs) {
    if (!labels.insert(c.name()).second) throw ConfigError("duplicate sweep label '" + c.name() + "'");
  }

  struct Pending {
    std::size_t config;
    SweepJob job;
  };
  std::vector<Pending> pending;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (int i = 0; i < options.n_seeds; ++i) {
      SweepJob job;
      job.label = configs[c].name();
      job.seed = configs[c].seed + static_cast<std::uint64_t>(i);
      if (options.out_dir) {
        job.metrics_path = *options.out_dir / job.label / ("seed_" + std::to_string(job.seed) + ".csv");
      }
      pending.push_back({c, std::move(job)});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) return;
      Pending& p = pending[k];
      RunConfig cfg = configs[p.config];
      cfg.seed = p.job.seed;
      try {
        if (!p.job.metrics_path.empty()) {
          std::filesystem::create_directories(p.job.metrics_path.parent_path());
          std::ofstream csv(p.job.metrics_path);
          if (!csv) throw ConfigError("cannot write " + p.job.metrics_path.string());
          RunHooks hooks;
          hooks.metrics = &csv;
          RunResult r = run_training(cfg, hooks);
          auto ckpt_path = p.job.metrics_path;
          ckpt_path.replace_extension(".bin");
          std::ofstream ckpt(ckpt_path, std::ios::binary);
          r.learner->save(ckpt);
          p.job.rows = std::move(r.rows);
        } else {
          p.job.rows = run_training(cfg).rows;
        }
        p.job.ok = true;
      } catch (const std::exception& e) {
        p.job.ok = false;
        p.job.error = e.what();
      }
      if (options.on_job_done) {
        std::lock_guard lock(report_mutex);
        options.on_job_done(p.job);
      }
    }
  };

  const int n_threads = std::min<int>(options.parallelism, static_cast<int>(pending.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  SweepResult out;
  for (auto& p : pending) out.jobs.push_back(std::move(p.job));
  out.aggregate = aggregate(out.jobs, configs);
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepJob>& jobs, const std::vector<RunConfig>& configs) {
  std::vector<AggregateRow> out;
  for (const auto& cfg : configs) {
    const std::string label = cfg.name();
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_checkpoint;
    for (const auto& job : jobs) {
      if (!job.ok || job.label != label) continue;
      for (const auto& e : checkpoints(job.rows)) {
        auto& slot = by_checkpoint[e.checkpoint];
        slot.first.push_back(e.id_success);
        slot.second.push_back(e.ood_success);
      }
    }
    for (const auto& [k, values] : by_checkpoint) {
      AggregateRow row;
      row.label = label;
      row.checkpoint = k;
      row.step = std::min<std::int64_t>(static_cast<std::int64_t>(k) * cfg.eval_interval, cfg.t_max);
      row.runs = static_cast<int>(values.first.size());
      row.id_median = quantile(values.first, 0.5);
      row.id_q25 = quantile(values.first, 0.25);
      row.id_q75 = quantile(values.first, 0.75);
      row.ood_median = quantile(values.second, 0.5);
      row.ood_q25 = quantile(values.second, 0.25);
      row.ood_q75 = quantile(values.second, 0.75);
      out.push_back(row);
    }
  }
  return out;
}

void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "label,checkpoint,step,runs,id_median,id_q25,id_q75,ood_median,ood_q25,ood_q75\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.checkpoint << ',' << r.step << ',' << r.runs << ',' << format_real(r.id_median) << ','
        << format_real(r.id_q25) << ',' << format_real(r.id_q75) << ',' << format_real(r.ood_median) << ','
        << format_real(r.ood_q25) << ',' << format_real(r.ood_q75) << '\n';
  }
}

}  // namespace auxss
