#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "leangreen/energy.hpp"
#include "leangreen/error.hpp"
#include "leangreen/event_calendar.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/random_stream.hpp"
#include "leangreen/types.hpp"

namespace leangreen {

/// A batch flowing through the line.
struct Entity {
  std::size_t id = 0;
  SimTime created_at;
  std::optional<SimTime> completed_at;
  ClassTotals accumulators;
  Location current_location;

  // Per-station queue wait and service duration, per-link transfer duration.
  std::vector<double> waits;
  std::vector<double> services;
  std::vector<double> transfers;

  double flow_time() const { return completed_at ? *completed_at - created_at : 0.0; }
};

struct StationOccupancy {
  double busy_server_min = 0.0;  // within the statistics window
  double idle_server_min = 0.0;
  std::size_t services_started = 0;
  std::size_t max_queue = 0;
};

struct ReplicationResult {
  std::uint64_t replication_index = 0;
  std::vector<Entity> completed;  // released at or after warmup, finished before the end
  std::size_t in_flight = 0;      // released but unfinished at the end
  std::size_t warmup_discarded = 0;
  std::vector<StationOccupancy> stations;
  SimTime window_start;  // warmup
  SimTime span;          // time the replication ended
  std::vector<ActivityRecord> trace;
};

namespace detail {

class ReplicationRun {
 public:
  ReplicationRun(const LineConfig& config, RandomStream& rng, double horizon)
      : cfg_(config), rng_(rng), horizon_(horizon) {
    const std::size_t n = cfg_.stations.size();
    queues_.resize(n);
    busy_.assign(n, 0);
    last_change_.assign(n, SimTime{0.0});
    occupancy_.resize(n);
    links_.reserve(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const TransferLink* l = cfg_.link_after(i);
      if (!l) throw SimulationError("no transfer link after station " + cfg_.stations[i].id);
      links_.push_back(l);
    }
    for (const auto& s : cfg_.stations) services_.push_back(s.effective_service(cfg_.batch_size));
  }

  ReplicationResult run() {
    if (!(horizon_ > 0)) throw SimulationError("horizon must be positive");
    const int batches = cfg_.batches_released();
    const double interval = cfg_.release.rule == ReleaseRule::Interval ? cfg_.release.interval_min : 0.0;
    entities_.resize(static_cast<std::size_t>(batches));
    state_.resize(entities_.size());
    for (std::size_t i = 0; i < entities_.size(); ++i) {
      Entity& e = entities_[i];
      e.id = i;
      e.created_at = SimTime{interval * static_cast<double>(i)};
      e.waits.assign(cfg_.stations.size(), 0.0);
      e.services.assign(cfg_.stations.size(), 0.0);
      e.transfers.assign(links_.size(), 0.0);
      if (e.created_at.minutes <= horizon_) {
        cal_.schedule({e.created_at, 0, EventKind::ArrivalAtStation, i, std::size_t{0}});
        ++released_;
      }
    }
    cal_.schedule({SimTime{horizon_}, 0, EventKind::ReplicationEnd, std::nullopt, std::nullopt});

    SimTime end{horizon_};
    while (!cal_.empty()) {
      Event ev = cal_.pop();
      if (ev.kind == EventKind::ReplicationEnd) break;
      dispatch(ev);
      if (cal_.size() == 1 && cal_.peek().kind == EventKind::ReplicationEnd) {
        if (finished_ < released_)
          throw StalledSimulation("calendar exhausted with " + std::to_string(released_ - finished_) +
                                  " batch(es) still in the line");
        end = cal_.now();
        break;
      }
    }
    return finish(end);
  }

 private:
  struct InProgress {
    bool active = false;
    Location where;
    SimTime start;
    SimTime arrival;  // arrival at the current station
  };

  void dispatch(const Event& ev) {
    const std::size_t e = *ev.entity;
    const std::size_t j = *ev.station;
    switch (ev.kind) {
      case EventKind::ArrivalAtStation: on_arrival(e, j); break;
      case EventKind::ServiceStart: on_service_start(e, j); break;
      case EventKind::ServiceEnd: on_service_end(e, j); break;
      case EventKind::TransferStart: on_transfer_start(e, j); break;
      case EventKind::TransferEnd: on_transfer_end(e, j); break;
      case EventKind::ReplicationEnd: break;
    }
  }

  void set_busy(std::size_t j, int busy) {
    const SimTime now = cal_.now();
    const Station& s = cfg_.stations[j];
    const int idle = s.servers - busy_[j];
    if (now > last_change_[j] && idle > 0)
      trace_.push_back(make_record(std::nullopt, {LocationKind::Station, j}, TimeClass::WAIT, last_change_[j], now,
                                   s.power_idle_kw * idle));
    last_change_[j] = now;
    busy_[j] = busy;
  }

  void on_arrival(std::size_t e, std::size_t j) {
    Entity& ent = entities_[e];
    ent.current_location = {LocationKind::Station, j};
    state_[e].arrival = cal_.now();
    if (busy_[j] < cfg_.stations[j].servers) {
      set_busy(j, busy_[j] + 1);
      cal_.schedule({cal_.now(), 0, EventKind::ServiceStart, e, j});
    } else {
      queues_[j].push_back(e);
      occupancy_[j].max_queue = std::max(occupancy_[j].max_queue, queues_[j].size());
    }
  }

  void on_service_start(std::size_t e, std::size_t j) {
    Entity& ent = entities_[e];
    const double wait = cal_.now() - state_[e].arrival;
    ent.waits[j] = wait;
    ent.accumulators[TimeClass::WAIT] += wait;
    ++occupancy_[j].services_started;
    state_[e].active = true;
    state_[e].where = {LocationKind::Station, j};
    state_[e].start = cal_.now();
    const double d = services_[j].sample(rng_);
    cal_.schedule({cal_.now() + d, 0, EventKind::ServiceEnd, e, j});
  }

  void on_service_end(std::size_t e, std::size_t j) {
    Entity& ent = entities_[e];
    const Station& s = cfg_.stations[j];
    const double d = cal_.now() - state_[e].start;
    ent.services[j] = d;
    ent.accumulators[time_class_of(s.value_class)] += d;
    trace_.push_back(make_record(e, {LocationKind::Station, j}, time_class_of(s.value_class), state_[e].start,
                                 cal_.now(), s.power_active_kw));
    state_[e].active = false;

    if (!queues_[j].empty()) {
      const std::size_t next = queues_[j].front();
      queues_[j].pop_front();
      cal_.schedule({cal_.now(), 0, EventKind::ServiceStart, next, j});
    } else {
      set_busy(j, busy_[j] - 1);
    }

    if (j + 1 == cfg_.stations.size()) {
      ent.completed_at = cal_.now();
      ++finished_;
    } else {
      cal_.schedule({cal_.now(), 0, EventKind::TransferStart, e, j});
    }
  }

  void on_transfer_start(std::size_t e, std::size_t k) {
    entities_[e].current_location = {LocationKind::Link, k};
    state_[e].active = true;
    state_[e].where = {LocationKind::Link, k};
    state_[e].start = cal_.now();
    const double d = links_[k]->duration.sample(rng_);
    cal_.schedule({cal_.now() + d, 0, EventKind::TransferEnd, e, k});
  }

  void on_transfer_end(std::size_t e, std::size_t k) {
    Entity& ent = entities_[e];
    const double d = cal_.now() - state_[e].start;
    ent.transfers[k] = d;
    ent.accumulators[TimeClass::TRANSFER] += d;
    trace_.push_back(make_record(e, {LocationKind::Link, k}, TimeClass::TRANSFER, state_[e].start, cal_.now(),
                                 links_[k]->power_kw));
    state_[e].active = false;
    cal_.schedule({cal_.now(), 0, EventKind::ArrivalAtStation, e, k + 1});
  }

  ReplicationResult finish(SimTime end) {
    // Close idle intervals and activities cut off by the end of the run.
    for (std::size_t j = 0; j < cfg_.stations.size(); ++j) {
      if (end > last_change_[j]) {
        const int idle = cfg_.stations[j].servers - busy_[j];
        if (idle > 0)
          trace_.push_back(make_record(std::nullopt, {LocationKind::Station, j}, TimeClass::WAIT, last_change_[j],
                                       end, cfg_.stations[j].power_idle_kw * idle));
      }
    }
    for (std::size_t e = 0; e < entities_.size(); ++e) {
      const InProgress& st = state_[e];
      if (!st.active || entities_[e].completed_at || end < st.start) continue;
      if (st.where.kind == LocationKind::Station) {
        const Station& s = cfg_.stations[st.where.index];
        trace_.push_back(make_record(e, st.where, time_class_of(s.value_class), st.start, end, s.power_active_kw));
      } else {
        trace_.push_back(
            make_record(e, st.where, TimeClass::TRANSFER, st.start, end, links_[st.where.index]->power_kw));
      }
    }

    ReplicationResult r;
    r.replication_index = rng_.replication_index();
    r.window_start = SimTime{std::min(cfg_.warmup_min, end.minutes)};
    r.span = end;

    // Clip the trace to the statistics window.
    r.trace.reserve(trace_.size());
    for (ActivityRecord rec : trace_) {
      if (rec.end < r.window_start) continue;
      if (rec.start < r.window_start) {
        rec.start = r.window_start;
        rec.energy_kwh = activity_energy(rec.power_kw, rec.start, rec.end);
      }
      r.trace.push_back(rec);
    }

    r.stations = occupancy_;
    for (const auto& rec : r.trace)
      if (rec.where.kind == LocationKind::Station && rec.time_class != TimeClass::WAIT)
        r.stations[rec.where.index].busy_server_min += rec.duration_min();
    const double window = end - r.window_start;
    for (std::size_t j = 0; j < r.stations.size(); ++j)
      r.stations[j].idle_server_min = std::max(0.0, cfg_.stations[j].servers * window - r.stations[j].busy_server_min);

    for (auto& ent : entities_) {
      if (ent.completed_at) {
        if (ent.created_at < r.window_start) ++r.warmup_discarded;
        else r.completed.push_back(std::move(ent));
      } else if (ent.created_at.minutes <= horizon_) {
        ++r.in_flight;
      }
    }
    return r;
  }

  const LineConfig& cfg_;
  RandomStream& rng_;
  double horizon_;
  EventCalendar cal_;
  std::vector<const TransferLink*> links_;
  std::vector<Distribution> services_;
  std::vector<std::deque<std::size_t>> queues_;
  std::vector<int> busy_;
  std::vector<SimTime> last_change_;
  std::vector<StationOccupancy> occupancy_;
  std::vector<Entity> entities_;
  std::vector<InProgress> state_;
  std::vector<ActivityRecord> trace_;
  std::size_t released_ = 0;
  std::size_t finished_ = 0;
};

}  // namespace detail

/// Runs one replication of a validated line until the horizon or until
/// every released batch has left the last station.
inline ReplicationResult run_replication(const LineConfig& config, RandomStream stream, double horizon) {
  detail::ReplicationRun run(config, stream, horizon);
  return run.run();
}

inline ReplicationResult run_replication(const LineConfig& config, RandomStream stream) {
  return run_replication(config, std::move(stream), config.horizon());
}

/// Runs `n` independent replications; replication i uses sub-stream i of
/// `base_seed`. `workers == 0` picks the hardware concurrency. The result is
/// the same for every worker count.
inline std::vector<ReplicationResult> run_replications(const LineConfig& config, std::uint64_t base_seed,
                                                       std::size_t n, double horizon, unsigned workers = 0) {
  if (n < 1) throw OutOfRange("at least one replication required");
  std::vector<std::optional<ReplicationResult>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i] = run_replication(config, RandomStream(base_seed, i), horizon);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const StalledSimulation& e) {
      throw StalledSimulation("replication " + std::to_string(i) + ": " + e.what());
    } catch (const SchedulingInPast& e) {
      throw SchedulingInPast("replication " + std::to_string(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw SimulationError("replication " + std::to_string(i) + ": " + e.what());
    }
  }

  std::vector<ReplicationResult> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace leangreen
