#pragma once

// The `run` command: for each level in norm order, assemble the complex of
// Gamma_0(level), compute homology in the requested degrees, classify the
// torsion and record the CSV rows in the ledger. Levels run in child
// processes so a memory budget can be enforced with RLIMIT_AS and a stuck
// job can be killed; budget overruns are recorded as skipped-budget.

#include <gmpxx.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vk/algebra/catalog.hpp"
#include "vk/analytics/report_csv.hpp"
#include "vk/analytics/reports.hpp"
#include "vk/complex/complex.hpp"
#include "vk/complex/cosets.hpp"
#include "vk/core/hash.hpp"
#include "vk/pipeline/fan_cache.hpp"
#include "vk/pipeline/job.hpp"
#include "vk/pipeline/ledger.hpp"

namespace vk::pipeline {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

/// Bumped whenever the rows computed for a level could change.
inline constexpr const char* kEngineVersion = "vkt-engine 1";

struct GroupContext {
  std::shared_ptr<const algebra::NumberField> F;
  voronoi::FormSpace V;
  voronoi::Fan fan;
  analytics::GroupDescriptor g;
  std::vector<int> degrees;
};

/// |P^{n-1}(O/level)| = prod over p^e || level of N(p)^{(e-1)(n-1)} (N(p)^n - 1) / (N(p) - 1).
inline Int gamma0_index(const OIdeal& level, int n) {
  Int idx = 1;
  if (level.is_unit_ideal()) return idx;
  for (const auto& f : algebra::ideal_factor(level)) {
    const Int q = f.prime.norm();
    Int qn = 1, qe = 1;
    for (int i = 0; i < n; ++i) qn *= q;
    for (int i = 0; i < (f.exponent - 1) * (n - 1); ++i) qe *= q;
    idx *= qe * (qn - 1) / (q - 1);
  }
  return idx;
}

/// Rough lower estimate of the memory a level needs: the coset table and
/// one boundary entry per (coset, cell orbit) pair.
inline double estimated_bytes(const GroupContext& ctx, const OIdeal& level) {
  std::size_t orbits = 0;
  for (const auto& dim : ctx.fan.by_dim) orbits += dim.size();
  const double index = gamma0_index(level, ctx.V.n()).get_d();
  return index * (4.0 * ctx.V.n() + 16) + index * static_cast<double>(orbits) * 64 + (1 << 20);
}

/// CSV rows (without newline) of one level, one per degree.
inline std::vector<std::string> compute_level_rows(const GroupContext& ctx, const OIdeal& level,
                                                   std::optional<Clock::time_point> deadline) {
  complex::CosetSpace X(ctx.F, ctx.V.n(), level);
  const auto c = complex::assemble_complex(ctx.V, ctx.fan, X);
  std::map<int, std::size_t> known_rank;  // rank of d_k from an SNF already computed
  std::vector<std::string> rows;
  for (int k : ctx.degrees) {
    exactla::HomologyOptions opt;
    opt.snf.elimination.deadline = deadline;
    if (auto it = known_rank.find(k); it != known_rank.end()) opt.known_rank_dk = it->second;
    const auto h = complex::voronoi_homology(c, k, opt);
    known_rank[k + 1] = h.rank_dk1;
    const auto r = analytics::classify_primes(ctx.g, level, h.torsion.factored, Int(static_cast<unsigned long>(c.index)),
                                              k, h.betti);
    std::ostringstream os;
    analytics::write_report_row(os, r);
    std::string row = os.str();
    row.pop_back();
    rows.push_back(row);
  }
  return rows;
}

struct LevelOutcome {
  LevelStatus status = LevelStatus::failed;
  std::vector<std::string> rows;
  std::string message;
  double seconds = 0;
  std::uint64_t peak_kb = 0;
};

namespace run_detail {

inline std::uint64_t self_peak_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<std::uint64_t>(ru.ru_maxrss);
}

inline std::optional<Clock::time_point> deadline_of(double budget_sec, Clock::time_point start) {
  if (budget_sec <= 0) return std::nullopt;
  return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget_sec));
}

/// Child-side protocol: "done" then rows, or "budget <msg>" / "failed <msg>".
inline std::string run_and_encode(const GroupContext& ctx, const OIdeal& level, double budget_sec) {
  try {
    auto rows = compute_level_rows(ctx, level, deadline_of(budget_sec, Clock::now()));
    std::string out = "done\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
  } catch (const std::bad_alloc&) {
    return "budget memory budget exhausted\n";
  } catch (const BudgetExceeded& e) {
    return std::string("budget ") + e.what() + "\n";
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    return "failed " + msg + "\n";
  }
}

inline LevelOutcome decode(const std::string& text) {
  LevelOutcome o;
  std::istringstream is(text);
  std::string head;
  std::getline(is, head);
  if (head == "done") {
    o.status = LevelStatus::done;
    std::string row;
    while (std::getline(is, row)) o.rows.push_back(row);
  } else if (head.rfind("budget ", 0) == 0) {
    o.status = LevelStatus::skipped_budget;
    o.message = head.substr(7);
  } else if (head.rfind("failed ", 0) == 0) {
    o.message = head.substr(7);
  } else {
    o.message = "worker produced no result";
  }
  return o;
}

struct Child {
  pid_t pid = -1;
  int fd = -1;
  std::size_t slot = 0;  // index into the pending list
  Clock::time_point start;
  std::string output;
  double reservation = 0;
  bool killed = false;
};

inline void write_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    ssize_t w = ::write(fd, s.data() + off, s.size() - off);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) return;
    off += static_cast<std::size_t>(w);
  }
}

inline Child spawn(const GroupContext& ctx, const OIdeal& level, double budget_sec, std::uint64_t budget_mem) {
  int fds[2];
  if (pipe(fds) != 0) throw ConfigError(std::string("pipe failed: ") + std::strerror(errno));
  std::cout.flush();
  std::cerr.flush();
  const pid_t pid = fork();
  if (pid < 0) throw ConfigError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::close(fds[0]);
    if (budget_mem > 0) {
      rlimit lim{static_cast<rlim_t>(budget_mem), static_cast<rlim_t>(budget_mem)};
      setrlimit(RLIMIT_AS, &lim);
    }
    std::string out;
    try {
      out = run_and_encode(ctx, level, budget_sec);
    } catch (...) {
      out = "budget memory budget exhausted\n";
    }
    write_all(fds[1], out);
    ::close(fds[1]);
    _exit(0);
  }
  ::close(fds[1]);
  Child c;
  c.pid = pid;
  c.fd = fds[0];
  c.start = Clock::now();
  return c;
}

inline LevelOutcome reap(Child& c, std::uint64_t budget_mem) {
  int status = 0;
  rusage ru{};
  while (wait4(c.pid, &status, 0, &ru) < 0 && errno == EINTR) {
  }
  ::close(c.fd);
  LevelOutcome o = decode(c.output);
  o.seconds = std::chrono::duration<double>(Clock::now() - c.start).count();
  o.peak_kb = static_cast<std::uint64_t>(ru.ru_maxrss);
  if (c.killed) {
    o.status = LevelStatus::skipped_budget;
    o.rows.clear();
    o.message = "wall-clock budget exceeded";
  } else if (WIFSIGNALED(status)) {
    o.rows.clear();
    o.status = budget_mem > 0 ? LevelStatus::skipped_budget : LevelStatus::failed;
    o.message = "worker terminated by signal " + std::to_string(WTERMSIG(status));
  }
  return o;
}

inline std::uint64_t physical_memory() {
  const long pages = sysconf(_SC_PHYS_PAGES), size = sysconf(_SC_PAGE_SIZE);
  return pages > 0 && size > 0 ? static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(size) : 0;
}

inline bool budget_grew(const LevelEntry& e, const JobSpec& spec) {
  auto grew = [](double now, double before) { return before > 0 && (now <= 0 || now > before); };
  return grew(spec.budget_sec, e.budget_sec) || grew(static_cast<double>(spec.budget_mem), static_cast<double>(e.budget_mem));
}

}  // namespace run_detail

struct RunPaths {
  fs::path ledger;
  fs::path csv;
};

inline RunPaths run_paths(const std::string& out_dir, const std::string& field_label, int n) {
  const std::string stem = field_label + "-n" + std::to_string(n);
  return {fs::path(out_dir) / (stem + ".ledger.json"), fs::path(out_dir) / (stem + ".csv")};
}

/// The report CSV of a ledger: header plus the rows of done levels in ledger order.
inline std::string ledger_csv(const RunLedger& L) {
  std::ostringstream os;
  analytics::write_report_header(os);
  for (const auto& e : L.levels)
    if (e.status == LevelStatus::done)
      for (const auto& r : e.rows) os << r << "\n";
  return os.str();
}

inline RunLedger cmd_run(JobSpec spec, const algebra::Catalog& catalog, std::ostream& log = std::cerr) {
  using namespace run_detail;
  spec = validated(std::move(spec), catalog);
  auto F = catalog.field(spec.field);
  fs::create_directories(spec.out_dir);
  const auto paths = run_paths(spec.out_dir, F->label(), spec.n);
  const auto group = analytics::describe_group(*F, spec.n);

  RunLedger L;
  if (auto old = load_ledger(paths.ledger)) {
    if (old->field != F->label() || old->n != spec.n || old->degrees != spec.degrees)
      throw ConfigError("ledger " + paths.ledger.string() + " belongs to " + old->group + " degrees " +
                        nlohmann::json(old->degrees).dump() + "; use a different --out");
    L = std::move(*old);
  }
  L.group = group.name();
  L.field = F->label();
  L.n = spec.n;
  L.degrees = spec.degrees;
  const std::uint64_t catalog_hash = catalog.record_hash(F->label());
  L.catalog_hash = hex64(catalog_hash);

  const auto levels = levels_of(spec, *F);
  GroupContext ctx{F, voronoi::FormSpace(F, spec.n), {}, group, spec.degrees};
  if (!levels.empty()) {
    auto cached = load_or_build_fan(ctx.V, resolve_cache_dir(spec.cache_dir, spec.out_dir), catalog_hash, log);
    ctx.fan = std::move(cached.fan);
    L.fan_hash = cached.hash;
  }

  // Register the levels of this run; previously recorded levels stay.
  std::vector<std::size_t> todo;  // indices into `levels`
  std::vector<std::string> hashes;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string hnf = levels[i].hnf_string();
    std::string key = std::string(kEngineVersion) + "|" + L.catalog_hash + "|" + L.fan_hash + "|" + hnf + "|";
    for (int k : spec.degrees) key += std::to_string(k) + ",";
    hashes.push_back(hex64(fnv1a64(key)));
    LevelEntry* e = L.find(hnf);
    if (!e) {
      L.levels.push_back({hnf, levels[i].norm().get_str()});
      e = &L.levels.back();
    }
    const bool fresh = e->job_hash == hashes[i];
    if (fresh && e->status == LevelStatus::done) continue;
    if (fresh && e->status == LevelStatus::skipped_budget && !budget_grew(*e, spec)) continue;
    e->status = LevelStatus::pending;
    e->rows.clear();
    e->message.clear();
    todo.push_back(i);
  }
  std::stable_sort(L.levels.begin(), L.levels.end(), [&](const LevelEntry& a, const LevelEntry& b) {
    return OIdeal::parse_hnf(*F, a.level_hnf) < OIdeal::parse_hnf(*F, b.level_hnf);
  });
  save_ledger(paths.ledger, L);

  auto record = [&](std::size_t i, const LevelOutcome& o) {
    LevelEntry* e = L.find(levels[i].hnf_string());
    e->status = o.status;
    e->rows = o.rows;
    e->message = o.message;
    e->seconds = o.seconds;
    e->peak_kb = o.peak_kb;
    e->job_hash = hashes[i];
    e->budget_sec = spec.budget_sec;
    e->budget_mem = spec.budget_mem;
    save_ledger(paths.ledger, L);
    write_atomically(paths.csv, ledger_csv(L));
    log << "level " << e->level_hnf << " (norm " << e->level_norm << "): " << to_string(e->status);
    if (!e->message.empty()) log << " (" << e->message << ")";
    log << "\n";
  };

  // Admission: a level whose estimate alone exceeds its memory budget is
  // skipped outright; the others are admitted while their reservations fit
  // in physical memory.
  const double capacity = static_cast<double>(physical_memory());
  auto reservation = [&](std::size_t i) {
    return spec.budget_mem > 0 ? static_cast<double>(spec.budget_mem) : estimated_bytes(ctx, levels[i]);
  };
  std::vector<std::size_t> queue;
  for (std::size_t i : todo) {
    const double est = estimated_bytes(ctx, levels[i]);
    if (spec.budget_mem > 0 && est > static_cast<double>(spec.budget_mem)) {
      LevelOutcome o;
      o.status = LevelStatus::skipped_budget;
      o.message = "estimated footprint " + std::to_string(static_cast<std::uint64_t>(est)) +
                  " bytes exceeds the memory budget";
      record(i, o);
    } else {
      queue.push_back(i);
    }
  }

  if (!spec.isolate) {
    for (std::size_t i : queue) {
      const auto start = Clock::now();
      LevelOutcome o = decode(run_and_encode(ctx, levels[i], spec.budget_sec));
      o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
      o.peak_kb = self_peak_kb();
      record(i, o);
    }
  } else {
    std::vector<Child> running;
    std::size_t next = 0;
    double reserved = 0;
    while (next < queue.size() || !running.empty()) {
      while (next < queue.size() && static_cast<int>(running.size()) < spec.jobs &&
             (running.empty() || capacity <= 0 || reserved + reservation(queue[next]) <= capacity)) {
        Child c = spawn(ctx, levels[queue[next]], spec.budget_sec, spec.budget_mem);
        c.slot = queue[next];
        c.reservation = reservation(queue[next]);
        reserved += c.reservation;
        running.push_back(std::move(c));
        ++next;
      }
      std::vector<pollfd> pfds;
      for (const auto& c : running) pfds.push_back({c.fd, POLLIN, 0});
      ::poll(pfds.data(), pfds.size(), 100);
      for (std::size_t j = 0; j < running.size();) {
        Child& c = running[j];
        char buf[4096];
        bool eof = false;
        if (pfds[j].revents & (POLLIN | POLLHUP | POLLERR)) {
          ssize_t r = ::read(c.fd, buf, sizeof buf);
          if (r > 0) c.output.append(buf, static_cast<std::size_t>(r));
          eof = r == 0;
        }
        if (!eof && !c.killed && spec.budget_sec > 0 &&
            Clock::now() - c.start > std::chrono::duration<double>(spec.budget_sec + 2.0)) {
          ::kill(c.pid, SIGKILL);
          c.killed = true;
        }
        if (eof) {
          LevelOutcome o = reap(c, spec.budget_mem);
          reserved -= c.reservation;
          record(c.slot, o);
          running.erase(running.begin() + static_cast<std::ptrdiff_t>(j));
          pfds.erase(pfds.begin() + static_cast<std::ptrdiff_t>(j));
        } else {
          ++j;
        }
      }
    }
  }

  save_ledger(paths.ledger, L);
  write_atomically(paths.csv, ledger_csv(L));
  return L;
}

}  // namespace vk::pipeline
