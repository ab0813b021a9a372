#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "oraclemine/encoding.hpp"
#include "oraclemine/fsm.hpp"

namespace oraclemine {

// Complete, deterministic, initially connected machine. States are "1".."n";
// symbols are single characters when the alphabet allows it. A random
// spanning arborescence from the initial state is laid first, the remaining
// slots are filled uniformly. Same arguments, same machine.
[[nodiscard]] Fsm random_dfsm(std::size_t num_states, std::size_t num_inputs,
                              std::size_t num_outputs, std::uint64_t seed);

// Adds degree-1 transitions with fresh (output, target) pairs to every slot
// of a DFSM, so every |T(s,x)| equals degree and the DFSM stays a candidate.
// Transitions are shuffled within each slot and renamed t1..tN in slot order.
[[nodiscard]] Fsm inject_uncertainty(const Fsm& dfsm, std::size_t degree, std::uint64_t seed);

struct ExperimentConfig {
  std::size_t num_states = 10;
  std::size_t num_inputs = 3;
  std::size_t num_outputs = 2;
  std::size_t degree = 2;
  std::size_t repetitions = 30;
  std::uint64_t seed = 1;
  std::chrono::milliseconds time_budget{60'000};
  std::size_t pair_cap = kDefaultPairCap;
  std::size_t jobs = 1;
};

// Throws InvalidArgument on a config outside the generator's domain.
void check_config(const ExperimentConfig& config);

struct AtomicRun {
  std::uint64_t plant_seed = 0;
  bool within_budget = true;
  std::size_t generated_tests = 0;
  std::size_t len_min = 0;
  std::size_t len_max = 0;
  double ms = 0; // mining time without expert time
  std::size_t progress_violations = 0;
};

struct ExperimentRow {
  BigInt dom_size;
  std::size_t ts_min = 0;
  std::size_t ts_max = 0;
  std::size_t len_min = 0;
  std::size_t len_max = 0;
  double t_min_ms = 0;
  double t_max_ms = 0;
  double t_med_ms = 0;
  std::size_t partial_runs = 0; // runs over the time budget, excluded from the metrics
  std::vector<AtomicRun> runs;

  [[nodiscard]] bool partial() const { return partial_runs > 0; }
};

// Plant, inject, mine with the plant as emulated expert, check the mined
// machine against the plant. Throws SoundnessFailure when they differ.
[[nodiscard]] AtomicRun run_atomic(const ExperimentConfig& config, std::size_t repetition);

[[nodiscard]] ExperimentRow run_experiment(const ExperimentConfig& config);

[[nodiscard]] std::string csv_header();
[[nodiscard]] std::string csv_config_echo(const ExperimentConfig& config);
[[nodiscard]] std::string csv_row(const std::string& label, const ExperimentRow& row);

// Number of adjacent rows whose median time decreases.
[[nodiscard]] std::size_t monotonic_violations(const std::vector<ExperimentRow>& rows);

} // namespace oraclemine
