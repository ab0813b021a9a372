#include "oraclemine/harness.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "oraclemine/distinguisher.hpp"
#include "oraclemine/errors.hpp"
#include "oraclemine/mining.hpp"
#include "oraclemine/random.hpp"

namespace oraclemine {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> alphabet(std::size_t n, char first, std::size_t single_limit,
                                  const char* prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(n <= single_limit ? std::string(1, static_cast<char>(first + i))
                                    : prefix + std::to_string(i + 1));
  }
  return out;
}

// Wraps the emulated expert and accounts for the time spent in it.
class TimedExpert final : public Expert {
public:
  explicit TimedExpert(Fsm dfsm) : inner_(std::move(dfsm)) {}

  OutputWord choose(const Fsm& machine, const InputWord& test,
                    std::span<const OfferedResponse> offered) override {
    auto start = Clock::now();
    OutputWord y = inner_.choose(machine, test, offered);
    spent_ += Clock::now() - start;
    return y;
  }

  [[nodiscard]] Clock::duration spent() const { return spent_; }

private:
  EmulatedExpert inner_;
  Clock::duration spent_{};
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

} // namespace

Fsm random_dfsm(std::size_t num_states, std::size_t num_inputs, std::size_t num_outputs,
                std::uint64_t seed) {
  if (num_states == 0 || num_inputs == 0 || num_outputs == 0) {
    throw InvalidArgument("random_dfsm needs at least one state, input and output");
  }
  Rng rng(seed);
  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> target(num_states * num_inputs, kFree);
  // State i is attached below a random free slot of states 0..i-1.
  for (std::size_t i = 1; i < num_states; ++i) {
    std::vector<std::size_t> free;
    for (std::size_t slot = 0; slot < i * num_inputs; ++slot) {
      if (target[slot] == kFree) {
        free.push_back(slot);
      }
    }
    target[free[rng.below(free.size())]] = i;
  }
  std::vector<Transition> ts;
  for (std::size_t slot = 0; slot < target.size(); ++slot) {
    std::size_t tgt = target[slot] == kFree ? rng.below(num_states) : target[slot];
    auto out = static_cast<SymbolIndex>(rng.below(num_outputs));
    ts.push_back(Transition{"t" + std::to_string(slot + 1),
                            static_cast<StateIndex>(slot / num_inputs),
                            static_cast<SymbolIndex>(slot % num_inputs), out,
                            static_cast<StateIndex>(tgt)});
  }
  std::vector<std::string> states;
  for (std::size_t s = 0; s < num_states; ++s) {
    states.push_back(std::to_string(s + 1));
  }
  return Fsm("S" + std::to_string(seed), std::move(states), 0,
             alphabet(num_inputs, 'a', 26, "x"), alphabet(num_outputs, '0', 10, "y"),
             std::move(ts));
}

Fsm inject_uncertainty(const Fsm& dfsm, std::size_t degree, std::uint64_t seed) {
  require_deterministic_complete(dfsm);
  if (degree < 2) {
    throw InvalidArgument("uncertainty degree must be at least 2");
  }
  const std::size_t pairs = dfsm.num_states() * dfsm.num_outputs();
  if (degree > pairs) {
    throw InvalidArgument("uncertainty degree " + std::to_string(degree) + " exceeds the " +
                          std::to_string(pairs) + " distinct (output, target) pairs");
  }
  Rng rng(seed);
  std::vector<Transition> ts;
  for (std::size_t slot = 0; slot < dfsm.num_slots(); ++slot) {
    const Transition& base = dfsm.transition(dfsm.slot(slot).front());
    std::vector<std::pair<SymbolIndex, StateIndex>> fresh;
    for (StateIndex q = 0; q < dfsm.num_states(); ++q) {
      for (SymbolIndex y = 0; y < dfsm.num_outputs(); ++y) {
        if (y != base.output || q != base.tgt) {
          fresh.emplace_back(y, q);
        }
      }
    }
    // Partial Fisher-Yates: the first degree-1 entries are a uniform sample.
    for (std::size_t k = 0; k + 1 < degree; ++k) {
      std::swap(fresh[k], fresh[k + rng.below(fresh.size() - k)]);
    }
    std::vector<std::pair<SymbolIndex, StateIndex>> chosen{{base.output, base.tgt}};
    chosen.insert(chosen.end(), fresh.begin(), fresh.begin() + static_cast<std::ptrdiff_t>(degree - 1));
    rng.shuffle(chosen);
    for (const auto& [y, q] : chosen) {
      ts.push_back(Transition{"t" + std::to_string(ts.size() + 1), base.src, base.input, y, q});
    }
  }
  return Fsm(dfsm.name() + "_U" + std::to_string(degree), dfsm.states(), dfsm.initial(),
             dfsm.inputs(), dfsm.outputs(), std::move(ts));
}

void check_config(const ExperimentConfig& c) {
  if (c.num_states == 0 || c.num_inputs == 0 || c.num_outputs == 0) {
    throw InvalidArgument("states, inputs and outputs must be positive");
  }
  if (c.degree < 2 || c.degree > c.num_states * c.num_outputs) {
    throw InvalidArgument("uncertainty degree must lie in [2, states x outputs]");
  }
  if (c.repetitions == 0) {
    throw InvalidArgument("at least one repetition is needed");
  }
}

AtomicRun run_atomic(const ExperimentConfig& config, std::size_t repetition) {
  AtomicRun run;
  run.plant_seed = splitmix64(config.seed + repetition);
  Fsm plant = random_dfsm(config.num_states, config.num_inputs, config.num_outputs, run.plant_seed);
  Fsm machine = inject_uncertainty(plant, config.degree, splitmix64(run.plant_seed));

  TimedExpert expert(plant);
  SessionOptions options;
  options.pair_cap = config.pair_cap;
  auto start = Clock::now();
  options.deadline = start + config.time_budget;
  try {
    MiningSession session(machine, {}, options);
    drive(session, expert);
    run.ms = std::chrono::duration<double, std::milli>(Clock::now() - start - expert.spent()).count();
    if (session.status() != SessionStatus::Done) {
      throw InconclusiveSearch("repetition " + std::to_string(repetition) +
                               ": pair search inconclusive");
    }
    if (!equivalent(*session.result(), plant)) {
      throw SoundnessFailure("repetition " + std::to_string(repetition) + " (plant seed " +
                             std::to_string(run.plant_seed) + "): mined machine differs from plant");
    }
    run.generated_tests = session.adequate_tests().size();
    for (std::size_t k = 0; k < session.adequate_tests().size(); ++k) {
      std::size_t len = session.adequate_tests()[k].size();
      run.len_min = k == 0 ? len : std::min(run.len_min, len);
      run.len_max = std::max(run.len_max, len);
    }
    run.progress_violations = progress_violations(session);
  } catch (const BudgetExceeded&) {
    run.within_budget = false;
    run.ms = std::chrono::duration<double, std::milli>(Clock::now() - start - expert.spent()).count();
  }
  spdlog::debug("repetition {}: {} tests, {:.1f} ms", repetition, run.generated_tests, run.ms);
  return run;
}

ExperimentRow run_experiment(const ExperimentConfig& config) {
  check_config(config);
  ExperimentRow row;
  row.dom_size = boost::multiprecision::pow(BigInt(config.degree),
                                            static_cast<unsigned>(config.num_states * config.num_inputs));
  row.runs.resize(config.repetitions);

  std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, config.repetitions);
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t rep;
      {
        std::lock_guard lock(mu);
        if (next == config.repetitions || failure) {
          return;
        }
        rep = next++;
      }
      try {
        row.runs[rep] = run_atomic(config, rep);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<double> times;
  bool first = true;
  for (const auto& r : row.runs) {
    if (!r.within_budget) {
      ++row.partial_runs;
      continue;
    }
    times.push_back(r.ms);
    if (first) {
      row.ts_min = row.ts_max = r.generated_tests;
      row.len_min = r.len_min;
      row.len_max = r.len_max;
      first = false;
    } else {
      row.ts_min = std::min(row.ts_min, r.generated_tests);
      row.ts_max = std::max(row.ts_max, r.generated_tests);
      row.len_min = std::min(row.len_min, r.len_min);
      row.len_max = std::max(row.len_max, r.len_max);
    }
  }
  if (!times.empty()) {
    row.t_min_ms = *std::min_element(times.begin(), times.end());
    row.t_max_ms = *std::max_element(times.begin(), times.end());
    row.t_med_ms = median(times);
  }
  return row;
}

std::string csv_header() {
  return "U_or_M,dom_size,ts_min,ts_max,len_min,len_max,t_min_ms,t_max_ms,t_med_ms";
}

std::string csv_config_echo(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "# states=" << c.num_states << " inputs=" << c.num_inputs << " outputs=" << c.num_outputs
      << " degree=" << c.degree << " reps=" << c.repetitions << " seed=" << c.seed
      << " budget_ms=" << c.time_budget.count() << " pair_cap=" << c.pair_cap;
  return out.str();
}

std::string csv_row(const std::string& label, const ExperimentRow& row) {
  std::ostringstream out;
  out << label << ',' << format_scientific(row.dom_size) << ',' << row.ts_min << ',' << row.ts_max
      << ',' << row.len_min << ',' << row.len_max << ',' << std::fixed << std::setprecision(1)
      << row.t_min_ms << ',' << row.t_max_ms << ',' << row.t_med_ms;
  if (row.partial()) {
    out << "\n# partial row: " << row.partial_runs << " runs over budget";
  }
  return out.str();
}

std::size_t monotonic_violations(const std::vector<ExperimentRow>& rows) {
  std::size_t v = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    v += rows[k].t_med_ms < rows[k - 1].t_med_ms ? 1 : 0;
  }
  return v;
}

} // namespace oraclemine
