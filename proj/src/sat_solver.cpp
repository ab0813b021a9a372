#include "oraclemine/sat_solver.hpp"

#include <algorithm>

namespace oraclemine::sat {

Var Solver::new_var(bool preferred_phase) {
  Var v = num_vars();
  assigns_.push_back(kUndef);
  phase_.push_back(preferred_phase ? 1 : 0);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  seen_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

bool Solver::add_clause(Clause clause) {
  if (!ok_) {
    return false;
  }
  backtrack(0);
  std::sort(clause.begin(), clause.end(), [](Lit a, Lit b) { return a.code < b.code; });
  Clause kept;
  for (std::size_t i = 0; i < clause.size(); ++i) {
    Lit l = clause[i];
    if (i > 0 && clause[i - 1] == l) {
      continue;
    }
    if (i + 1 < clause.size() && clause[i + 1] == ~l) {
      return true;
    }
    std::int8_t v = value(l);
    if (v == 1) {
      return true;
    }
    if (v == 0) {
      continue;
    }
    kept.push_back(l);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept.front(), -1);
    if (propagate() >= 0) {
      ok_ = false;
    }
    return ok_;
  }
  clauses_.push_back(std::move(kept));
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void Solver::attach(int clause) {
  const Clause& c = clauses_[clause];
  watches_[c[0].code].push_back(clause);
  watches_[c[1].code].push_back(clause);
}

void Solver::enqueue(Lit l, int reason) {
  Var v = l.var();
  assigns_[v] = l.negated() ? 0 : 1;
  level_[v] = level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  int conflict = -1;
  while (qhead_ < trail_.size() && conflict < 0) {
    Lit p = trail_[qhead_++];
    Lit false_lit = ~p;
    auto& ws = watches_[false_lit.code];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      Clause& c = clauses_[ci];
      if (c[0] == false_lit) {
        std::swap(c[0], c[1]);
      }
      if (value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[c[1].code].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) {
        continue;
      }
      ws[j++] = ci;
      if (value(c[0]) == 0) {
        conflict = ci;
        while (i < ws.size()) {
          ws[j++] = ws[i++];
        }
      } else {
        enqueue(c[0], ci);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

void Solver::analyze(int conflict, Clause& learnt, int& backjump) {
  learnt.clear();
  learnt.push_back(Lit{});
  int pending = 0;
  Lit p{-1};
  std::size_t idx = trail_.size();
  int clause = conflict;
  do {
    const Clause& c = clauses_[clause];
    for (std::size_t k = (p.code < 0 ? 0 : 1); k < c.size(); ++k) {
      Lit q = c[k];
      Var v = q.var();
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump(v);
        if (level_[v] >= level()) {
          ++pending;
        } else {
          learnt.push_back(q);
        }
      }
    }
    do {
      --idx;
    } while (!seen_[trail_[idx].var()]);
    p = trail_[idx];
    clause = reason_[p.var()];
    seen_[p.var()] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = ~p;

  backjump = 0;
  std::size_t max_i = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (level_[learnt[k].var()] > backjump) {
      backjump = level_[learnt[k].var()];
      max_i = k;
    }
  }
  if (learnt.size() > 1) {
    std::swap(learnt[1], learnt[max_i]);
  }
  for (Lit l : learnt) {
    seen_[l.var()] = 0;
  }
}

void Solver::backtrack(int lvl) {
  if (level() <= lvl) {
    return;
  }
  for (std::size_t k = trail_.size(); k > static_cast<std::size_t>(trail_lim_[lvl]); --k) {
    Var v = trail_[k - 1].var();
    assigns_[v] = kUndef;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) {
      heap_insert(v);
    }
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == kUndef) {
      return phase_[v] ? Lit::pos(v) : Lit::neg(v);
    }
  }
  return Lit{-1};
}

void Solver::bump(Var v) {
  activity_[v] += bump_amount_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) {
      a *= 1e-100;
    }
    bump_amount_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) {
    heap_up(heap_pos_[v]);
  }
}

namespace {
bool before(const std::vector<double>& act, Var a, Var b) {
  return act[a] > act[b] || (act[a] == act[b] && a < b);
}
} // namespace

void Solver::heap_insert(Var v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_pos_[v]);
}

void Solver::heap_up(int pos) {
  Var v = heap_[pos];
  while (pos > 0) {
    int parent = (pos - 1) / 2;
    if (!before(activity_, v, heap_[parent])) {
      break;
    }
    heap_[pos] = heap_[parent];
    heap_pos_[heap_[pos]] = pos;
    pos = parent;
  }
  heap_[pos] = v;
  heap_pos_[v] = pos;
}

void Solver::heap_down(int pos) {
  Var v = heap_[pos];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * pos + 1;
    if (child >= n) {
      break;
    }
    if (child + 1 < n && before(activity_, heap_[child + 1], heap_[child])) {
      ++child;
    }
    if (!before(activity_, heap_[child], v)) {
      break;
    }
    heap_[pos] = heap_[child];
    heap_pos_[heap_[pos]] = pos;
    pos = child;
  }
  heap_[pos] = v;
  heap_pos_[v] = pos;
}

Var Solver::heap_pop() {
  Var top = heap_.front();
  heap_pos_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

Result Solver::solve(std::span<const Lit> assumptions) {
  model_.clear();
  if (!ok_) {
    return Result::Unsat;
  }
  backtrack(0);
  Result result = Result::Unsat;
  Clause learnt;
  for (;;) {
    int conflict = propagate();
    if (conflict >= 0) {
      ++conflicts_;
      if (level() == 0) {
        ok_ = false;
        result = Result::Unsat;
        break;
      }
      int backjump = 0;
      analyze(conflict, learnt, backjump);
      backtrack(backjump);
      if (learnt.size() == 1) {
        enqueue(learnt.front(), -1);
      } else {
        clauses_.push_back(learnt);
        int ci = static_cast<int>(clauses_.size()) - 1;
        attach(ci);
        enqueue(clauses_[ci][0], ci);
      }
      bump_amount_ *= 1.0 / 0.95;
      continue;
    }
    if (static_cast<std::size_t>(level()) < assumptions.size()) {
      Lit a = assumptions[level()];
      std::int8_t v = value(a);
      if (v == 0) {
        result = Result::Unsat;
        break;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      if (v == kUndef) {
        enqueue(a, -1);
      }
      continue;
    }
    Lit decision = pick_branch();
    if (decision.code < 0) {
      model_ = assigns_;
      result = Result::Sat;
      break;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(decision, -1);
  }
  backtrack(0);
  return result;
}

} // namespace oraclemine::sat
