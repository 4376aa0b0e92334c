#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wordperc/common.hpp"
#include "wordperc/exploration.hpp"
#include "wordperc/model.hpp"
#include "wordperc/oracle.hpp"
#include "wordperc/oriented.hpp"
#include "wordperc/words.hpp"

// Monte Carlo harness.  One trial of any experiment is a pure function of
// (master_seed, trial index): the bond, site, and oriented seeds come from
// derive_seed, so counts are identical for every worker split, and sweeps
// that vary one parameter while keeping the master seed reuse the same
// underlying uniforms trial for trial (exact coupling).
//
// A trial that hits a resource guard (memory budget, height truncation in a
// bounded box) counts as `refused`, reported next to successes rather than
// silently dropped.  p_hat is successes over the trials that actually ran.

namespace wordperc {

enum class ExperimentKind {
  words_seen,         // all 2^L words of length L seen from the origin
  single_word,        // the one given word seen from the origin
  black_step,         // one fresh blackness determination succeeds
  b_event,            // at least m black vertices on the middle of diagonal 4m
  b_prop_pair,        // b at scale m for the prefix, and not b at scale 4m
  d_event,            // b_event for every driving prefix at scale m
  oriented_event,     // one of E1..E4 on a fresh oriented configuration
  ms_count,           // M_S < 4m on a fresh oriented configuration
  domination_window,  // block 0..w-1 fully active after t_burn chain steps
};

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::words_seen: return "words_seen";
    case ExperimentKind::single_word: return "single_word";
    case ExperimentKind::black_step: return "black_step";
    case ExperimentKind::b_event: return "b_event";
    case ExperimentKind::b_prop_pair: return "b_prop_pair";
    case ExperimentKind::d_event: return "d_event";
    case ExperimentKind::oriented_event: return "oriented_event";
    case ExperimentKind::ms_count: return "ms_count";
    default: return "domination_window";
  }
}

inline ExperimentKind kind_from_name(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::words_seen, ExperimentKind::single_word, ExperimentKind::black_step, ExperimentKind::b_event,
        ExperimentKind::b_prop_pair, ExperimentKind::d_event, ExperimentKind::oriented_event, ExperimentKind::ms_count,
        ExperimentKind::domination_window})
    if (s == kind_name(k)) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::words_seen;

  // Lattice experiments.
  ModelParams params;
  Box box = Box::parse("4x4xlazy");
  SeenGuards guards;
  std::size_t L = 0;  // words_seen
  Word xi;            // single_word

  // Exploration experiments.
  CouplingParams cp;
  StepKind step_kind = StepKind::east;  // black_step
  int letter1 = 0, letter2 = 0;         // black_step
  std::uint64_t m = 1;                  // scale for b/d/oriented kinds
  Word eta;                             // b_event, b_prop_pair

  // Oriented experiments.
  double gamma = 0.0;
  ProofEvent which = ProofEvent::E1;
  std::int64_t w_left = -1;       // E4 left extension, -1 means 8m
  bool e4_over_middle = true;
  std::vector<V2> sources;        // ms_count / E2; empty means the middle of diagonal 4m
  double rho = 0.0;               // domination_window
  std::uint64_t w = 3, t_burn = 16;

  // Fixed bond seed: every trial reuses one bond environment while sites
  // stay fresh (quenched estimates).
  std::optional<std::uint64_t> quenched_bond_seed;

  void validate() const {
    switch (kind) {
      case ExperimentKind::words_seen:
        check_lattice();
        break;
      case ExperimentKind::single_word:
        check_lattice();
        if (xi.length() == 0) throw ConfigError("single_word: word must be nonempty");
        break;
      case ExperimentKind::black_step:
        check_lattice();
        require_d3();
        cp.validate();
        if ((letter1 | letter2) > 1 || letter1 < 0 || letter2 < 0)
          throw ConfigError("black_step: letters must be 0 or 1");
        break;
      case ExperimentKind::b_event:
      case ExperimentKind::b_prop_pair:
      case ExperimentKind::d_event: {
        check_lattice();
        require_d3();
        cp.validate();
        if (m < 1) throw ConfigError("scale m must be positive");
        const std::uint64_t need_diag = kind == ExperimentKind::b_prop_pair ? 16 * m : 4 * m;
        if (cp.max_diag < need_diag)
          throw ConfigError(std::string(kind_name(kind)) + ": max_diag must be at least " + std::to_string(need_diag));
        if (kind != ExperimentKind::d_event) {
          const std::size_t need_letters =
              kind == ExperimentKind::b_prop_pair ? 2 * (16 * m - 1) : 2 * (4 * m - 1);
          if (eta.length() < need_letters)
            throw ConfigError(std::string(kind_name(kind)) + ": driving word needs at least " +
                              std::to_string(need_letters) + " letters");
        }
        break;
      }
      case ExperimentKind::oriented_event:
      case ExperimentKind::ms_count:
        check_prob(gamma, "gamma");
        if (m < 1) throw ConfigError("scale m must be positive");
        for (const V2& s : sources)
          if (s[0] + s[1] != std::int64_t(4 * m) - 1)
            throw ConfigError("sources must sit on the diagonal at sum 4m-1");
        break;
      case ExperimentKind::domination_window:
        check_prob(gamma, "gamma");
        check_prob(rho, "rho");
        if (w < 1 || w > 6) throw ConfigError("domination_window: w must be in 1..6");
        if (t_burn < w) throw ConfigError("domination_window: t_burn must be at least w");
        break;
    }
  }

  // One-line parameter echo, part of every emitted record.
  std::string digest() const {
    std::ostringstream o;
    o << "kind=" << kind_name(kind);
    switch (kind) {
      case ExperimentKind::words_seen:
      case ExperimentKind::single_word:
        o << ' ' << lattice_digest() << " box=" << box.to_string();
        if (kind == ExperimentKind::words_seen) o << " L=" << L;
        else o << " word=" << xi.to_string();
        break;
      case ExperimentKind::black_step:
        o << ' ' << lattice_digest() << " box=" << box.to_string() << " N=" << cp.N << " M=" << cp.M
          << " which=" << to_string(step_kind) << " letters=" << letter1 << letter2;
        break;
      case ExperimentKind::b_event:
      case ExperimentKind::b_prop_pair:
      case ExperimentKind::d_event:
        o << ' ' << lattice_digest() << " box=" << box.to_string() << " N=" << cp.N << " M=" << cp.M
          << " max_diag=" << cp.max_diag << " m=" << m;
        if (kind != ExperimentKind::d_event) o << " word=" << eta.to_string();
        break;
      case ExperimentKind::oriented_event:
        o << " gamma=" << format_double(gamma) << " m=" << m << " which=" << to_string(which);
        if (which == ProofEvent::E4)
          o << " w_left=" << effective_w_left() << " e4_count=" << (e4_over_middle ? "middle" : "full");
        break;
      case ExperimentKind::ms_count:
        o << " gamma=" << format_double(gamma) << " m=" << m << " sources=" << (sources.empty() ? "middle" : "custom");
        break;
      case ExperimentKind::domination_window:
        o << " gamma=" << format_double(gamma) << " rho=" << format_double(rho) << " w=" << w << " t_burn=" << t_burn;
        break;
    }
    if (quenched_bond_seed) o << " bond_seed=" << *quenched_bond_seed;
    return o.str();
  }

  std::int64_t effective_w_left() const { return w_left < 0 ? std::int64_t(8 * m) : w_left; }

 private:
  void check_lattice() const {
    params.validate();
    box.validate();
    if (box.dim() != params.d) throw ConfigError("box dimension != model d");
  }
  void require_d3() const {
    if (params.d != 3) throw ConfigError(std::string(kind_name(kind)) + ": exploration experiments need d=3");
  }
  static void check_prob(double v, const char* name) {
    if (v < 0.0 || v > 1.0) throw ConfigError(std::string(name) + " must be in [0,1]");
  }
  std::string lattice_digest() const {
    std::ostringstream o;
    o << "d=" << params.d << " p=" << format_double(params.p) << " eps=" << format_double(params.eps)
      << " K=" << params.K << " pn=" << params.pn.to_string();
    return o.str();
  }
};

struct EstimateRecord {
  std::string experiment;
  std::string digest;
  std::uint64_t trials = 0, successes = 0, refused = 0;
  double p_hat = 0.0, ci_lo = 0.0, ci_hi = 1.0;
  std::uint64_t master_seed = 0;
  double wall_seconds = 0.0;

  std::uint64_t effective_trials() const { return trials - refused; }
};

// One trial, fully determined by (spec, master_seed, trial).  Public so
// coupling properties can be asserted trial by trial.
inline TrialOutcome evaluate_trial(const ExperimentSpec& spec, std::uint64_t master_seed, std::uint64_t trial) {
  const std::uint64_t bond_seed =
      spec.quenched_bond_seed ? *spec.quenched_bond_seed : derive_seed(master_seed, trial, Stream::bond);
  const std::uint64_t site_seed = derive_seed(master_seed, trial, Stream::site);
  const std::uint64_t orient_seed = derive_seed(master_seed, trial, Stream::oriented);
  try {
    switch (spec.kind) {
      case ExperimentKind::words_seen: {
        const Environment env{spec.params, spec.box, bond_seed};
        const SiteField sites{spec.params.d, spec.params.p, site_seed};
        const WordSet seen = seen_words(env, sites, Coords::zeros(spec.params.d), spec.L, spec.guards);
        return seen.is_full() ? TrialOutcome::success : TrialOutcome::failure;
      }
      case ExperimentKind::single_word: {
        const Environment env{spec.params, spec.box, bond_seed};
        const SiteField sites{spec.params.d, spec.params.p, site_seed};
        return sees_word(env, sites, Coords::zeros(spec.params.d), spec.xi) ? TrialOutcome::success
                                                                            : TrialOutcome::failure;
      }
      case ExperimentKind::black_step: {
        const Environment env{spec.params, spec.box, bond_seed};
        const SiteField sites{3, spec.params.p, site_seed};
        CouplingParams cp = spec.cp;
        cp.max_diag = 2;
        const Word drive = Word({std::uint8_t(spec.letter1), std::uint8_t(spec.letter2)}).zero_padded(4);
        const ExplorationResult res = explore(env, sites, drive, cp);
        if (res.height_truncated_total > 0) return TrialOutcome::refused;
        const bool black =
            spec.step_kind == StepKind::east ? res.black_at(1, 0) : res.black_at(0, 1);
        return black ? TrialOutcome::success : TrialOutcome::failure;
      }
      case ExperimentKind::b_event:
      case ExperimentKind::b_prop_pair: {
        const Environment env{spec.params, spec.box, bond_seed};
        const SiteField sites{3, spec.params.p, site_seed};
        const Word drive = spec.eta.zero_padded(2 * spec.cp.max_diag);
        const ExplorationResult res = explore(env, sites, drive, spec.cp);
        if (res.height_truncated_total > 0) return TrialOutcome::refused;
        if (spec.kind == ExperimentKind::b_event)
          return b_event(res, spec.m) ? TrialOutcome::success : TrialOutcome::failure;
        const bool small_scale = black_on_middle(res, 4 * spec.m).size() >= spec.m;
        const bool big_scale = black_on_middle(res, 16 * spec.m).size() >= 4 * spec.m;
        return small_scale && !big_scale ? TrialOutcome::success : TrialOutcome::failure;
      }
      case ExperimentKind::d_event: {
        const Environment env{spec.params, spec.box, bond_seed};
        const SiteField sites{3, spec.params.p, site_seed};
        return d_event(env, sites, spec.m, spec.cp) ? TrialOutcome::success : TrialOutcome::failure;
      }
      case ExperimentKind::oriented_event: {
        const std::int64_t top = std::int64_t(16 * spec.m) - 1;
        Rect region{0, top, 0, top};
        if (spec.which == ProofEvent::E4) {
          region.x_lo = -spec.effective_w_left();
          region.y_hi = top + spec.effective_w_left();
        }
        const OrientedConfig cfg = sample_region(spec.gamma, region, orient_seed);
        const std::vector<V2> S = spec.sources.empty() ? plane_diagonal(4 * spec.m, 2) : spec.sources;
        return event_indicator(cfg, spec.m, S, spec.which, spec.w_left, spec.e4_over_middle)
                   ? TrialOutcome::success
                   : TrialOutcome::failure;
      }
      case ExperimentKind::ms_count: {
        const std::int64_t top = std::int64_t(16 * spec.m) - 1;
        const OrientedConfig cfg = sample_region(spec.gamma, Rect{0, top, 0, top}, orient_seed);
        const std::vector<V2> S = spec.sources.empty() ? plane_diagonal(4 * spec.m, 2) : spec.sources;
        return m_s(cfg, spec.m, S) < 4 * spec.m ? TrialOutcome::success : TrialOutcome::failure;
      }
      default: {  // domination_window
        const std::int64_t half = std::int64_t(spec.t_burn + spec.w);
        ChainState st;
        st.x_lo = -half;
        st.active.assign(std::size_t(2 * half + 1), 1);
        for (std::uint64_t t = 0; t < spec.t_burn; ++t) st = chain_step(st, spec.gamma, orient_seed);
        for (std::uint64_t x = 0; x < spec.w; ++x)
          if (!st.is_active(std::int64_t(x))) return TrialOutcome::failure;
        return TrialOutcome::success;
      }
    }
  } catch (const ResourceError&) {
    return TrialOutcome::refused;
  }
}

inline EstimateRecord run(const ExperimentSpec& spec, std::uint64_t trials, std::uint64_t master_seed,
                          unsigned workers = 0) {
  if (trials < 1) throw ConfigError("run: trials must be positive");
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const TrialCounts counts =
      run_trials(trials, workers, [&](std::uint64_t t) { return evaluate_trial(spec, master_seed, t); });
  const auto t1 = std::chrono::steady_clock::now();

  EstimateRecord rec;
  rec.experiment = kind_name(spec.kind);
  rec.digest = spec.digest();
  rec.trials = trials;
  rec.successes = counts.successes;
  rec.refused = counts.refused;
  rec.master_seed = master_seed;
  rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  const std::uint64_t effective = rec.effective_trials();
  if (effective > 0) {
    rec.p_hat = double(rec.successes) / double(effective);
    const WilsonInterval ci = wilson_ci(rec.successes, effective);
    rec.ci_lo = ci.lo;
    rec.ci_hi = ci.hi;
  } else {
    rec.p_hat = 0.0;
    rec.ci_lo = 0.0;
    rec.ci_hi = 1.0;
  }
  return rec;
}

}  // namespace wordperc
