#include "qnc/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "qnc/errors.hpp"

namespace qnc {

std::string to_string(Observable o) {
  switch (o) {
    case Observable::x1: return "x1";
    case Observable::X_plus: return "X_plus";
    case Observable::X_minus: return "X_minus";
    case Observable::y_sum: return "y_sum";
    case Observable::y_sum_lagged: return "y_sum_lagged";
  }
  return "x1";
}

Observable observable_from_string(const std::string& s) {
  for (auto o : {Observable::x1, Observable::X_plus, Observable::X_minus, Observable::y_sum,
                 Observable::y_sum_lagged})
    if (to_string(o) == s) return o;
  throw InvalidArgument("unknown observable '" + s + "'");
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::size_t index) {
  // splitmix64 finaliser (a bijection on 64-bit words)
  std::uint64_t z = base_seed + static_cast<std::uint64_t>(index) + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

struct OscSpec {
  double freq = 0.0;   // signed
  double gamma = 0.0;
  double n_T = 0.0;
  int force = 0;       // 0 -> force1, 1 -> force2
};

// One term w * (x cos(a) - p sin(a)), a = rate * t + phase, of a measured
// observable.
struct Member {
  std::size_t osc = 0;
  double weight = 1.0;
  double rate = 0.0;
  double phase = 0.0;
};

using Group = std::vector<Member>;

struct System {
  std::vector<OscSpec> osc;
  std::vector<Group> groups;
  std::vector<std::string> names;
  // (t, x, p, group records, out) -> channel values in `names` order
  std::function<void(double, const std::vector<double>&, const std::vector<double>&,
                     const std::vector<double>&, std::vector<double>&)>
      derive;
};

double observable(const Group& g, double t, const std::vector<double>& x,
                  const std::vector<double>& p) {
  double o = 0.0;
  for (const auto& m : g) {
    const double a = m.rate * t + m.phase;
    o += m.weight * (x[m.osc] * std::cos(a) - p[m.osc] * std::sin(a));
  }
  return o;
}

OscillatorParams second(const SimulationPlan& plan) {
  return plan.params2 ? *plan.params2 : plan.params1;
}

System build_system(const SimulationPlan& plan, Scheme scheme) {
  System sys;
  const auto& p1 = plan.params1;
  switch (scheme) {
    case Scheme::measured_oscillator: {
      sys.osc = {{p1.nu, p1.gamma, p1.n_T, 0}};
      sys.groups = {{{0, 1.0, plan.meas.angle_rate(), plan.meas.phase}}};
      sys.names = {"x", "p", "y", "r"};
      const Group g = sys.groups[0];
      sys.derive = [g](double t, const auto& x, const auto& p, const auto& rec, auto& out) {
        out = {x[0], p[0], observable(g, t, x, p), rec[0]};
      };
      break;
    }
    case Scheme::tc_pair: {
      const auto p2 = second(plan);
      const double sign = plan.measured_observable == Observable::X_minus ? -1.0 : 1.0;
      sys.osc = {{p1.nu, p1.gamma, p1.n_T, 0}, {-p2.nu, p2.gamma, p2.n_T, 1}};
      sys.groups = {{{0, 1.0, 0.0, 0.0}, {1, sign, 0.0, 0.0}}};
      sys.names = {"x1", "p1", "x2", "p2", "X_plus", "X_minus", "P_plus", "P_minus", "r"};
      sys.derive = [](double, const auto& x, const auto& p, const auto& rec, auto& out) {
        out = {x[0], p[0], x[1], p[1], x[0] + x[1], x[0] - x[1], p[0] + p[1], p[0] - p[1], rec[0]};
      };
      break;
    }
    case Scheme::effective_negative: {
      const double rate = 2.0 * p1.nu;
      const double phase = plan.meas.phase;
      sys.osc = {{p1.nu, p1.gamma, p1.n_T, 0}};
      sys.groups = {{{0, 1.0, rate, phase}}};
      sys.names = {"x", "p", "y", "p_y", "r"};
      sys.derive = [rate, phase](double t, const auto& x, const auto& p, const auto& rec,
                                 auto& out) {
        const double a = rate * t + phase;
        const double c = std::cos(a);
        const double s = std::sin(a);
        out = {x[0], p[0], x[0] * c - p[0] * s, x[0] * s + p[0] * c, rec[0]};
      };
      break;
    }
    case Scheme::narrowband_quads: {
      const double Om = *plan.effective_freq;
      const double up = p1.nu - Om;    // y_+ quadrature angle rate
      const double down = p1.nu + Om;  // y_- quadrature angle rate
      const double ph = plan.meas.phase;
      const double lag = ph + kPi / 2.0;
      sys.osc.assign(4, OscSpec{p1.nu, p1.gamma, p1.n_T, 0});
      sys.groups = {{{0, 1.0, up, ph}, {1, 1.0, down, ph}},
                    {{2, 1.0, up, lag}, {3, 1.0, down, lag}}};
      sys.names = {"y_plus", "p_plus", "y_minus", "p_minus", "z", "z_tilde",
                   "r_z", "r_z_tilde", "r"};
      const bool lagged = plan.measured_observable == Observable::y_sum_lagged;
      sys.derive = [=](double t, const auto& x, const auto& p, const auto& rec, auto& out) {
        const double a = up * t + ph;
        const double b = down * t + ph;
        const double yp = x[0] * std::cos(a) - p[0] * std::sin(a);
        const double pp = x[0] * std::sin(a) + p[0] * std::cos(a);
        const double ym = x[1] * std::cos(b) - p[1] * std::sin(b);
        const double pm = x[1] * std::sin(b) + p[1] * std::cos(b);
        const double a2 = up * t + lag;
        const double b2 = down * t + lag;
        const double zt = x[2] * std::cos(a2) - p[2] * std::sin(a2) + x[3] * std::cos(b2) -
                          p[3] * std::sin(b2);
        out = {yp, pp, ym, pm, yp + ym, zt, rec[0], rec[1], lagged ? rec[1] : rec[0]};
      };
      break;
    }
  }
  return sys;
}

std::size_t oscillator_count(Scheme s) {
  switch (s) {
    case Scheme::measured_oscillator:
    case Scheme::effective_negative: return 1;
    case Scheme::tc_pair: return 2;
    case Scheme::narrowband_quads: return 4;
  }
  return 1;
}

void check_scheme(const SimulationPlan& plan, Scheme scheme) {
  plan.validate();
  const auto obs = plan.measured_observable;
  switch (scheme) {
    case Scheme::measured_oscillator:
      if (obs != Observable::x1)
        throw InvalidArgument("measured oscillator: observable must be x1");
      break;
    case Scheme::effective_negative:
      if (obs != Observable::x1)
        throw InvalidArgument("effective negative oscillator: observable must be x1");
      break;
    case Scheme::tc_pair:
      if (obs != Observable::X_plus && obs != Observable::X_minus)
        throw InvalidArgument("tc pair: observable must be X_plus or X_minus");
      break;
    case Scheme::narrowband_quads: {
      if (obs != Observable::y_sum && obs != Observable::y_sum_lagged)
        throw InvalidArgument("narrowband: observable must be y_sum or y_sum_lagged");
      if (!plan.effective_freq)
        throw InvalidArgument("narrowband: effective_freq (Omega) is required");
      const double Om = *plan.effective_freq;
      if (!(Om > 0.0) || Om >= plan.params1.nu)
        throw InvalidArgument("narrowband: requires 0 < Omega < nu");
      break;
    }
  }
  const std::size_t n = oscillator_count(scheme);
  if (!plan.initial.empty() && plan.initial.size() != 1 && plan.initial.size() != n) {
    std::ostringstream os;
    os << "initial: expected 1 or " << n << " entries, got " << plan.initial.size();
    throw InvalidArgument(os.str());
  }
}

// Integrates one trajectory, calling sink(sample_index, channel_values) at
// every stored sample.
class Integrator {
 public:
  Integrator(const SimulationPlan& plan, const System& sys,
             const std::vector<std::vector<double>>& force_mid)
      : plan_(plan), sys_(sys), force_mid_(force_mid) {
    const double dt = plan.dt;
    for (const auto& o : sys.osc) {
      Prop pr;
      const double decay = std::exp(-0.5 * o.gamma * dt);
      pr.c = decay * std::cos(o.freq * dt);
      pr.s = decay * std::sin(o.freq * dt);
      const double half = std::exp(-0.25 * o.gamma * dt);
      pr.ch = half * std::cos(0.5 * o.freq * dt);
      pr.sh = half * std::sin(0.5 * o.freq * dt);
      pr.thermal = plan.noise_free ? 0.0 : std::sqrt(o.gamma * (2.0 * o.n_T + 1.0) * dt);
      prop_.push_back(pr);
    }
    backaction_ = plan.noise_free ? 0.0 : std::sqrt(8.0 * plan.meas.k * dt);
    record_ = plan.wants_record();
    if (record_ && !plan.noise_free) {
      const double window = static_cast<double>(plan.stride) * dt;
      record_sigma_ = 1.0 / std::sqrt(8.0 * plan.meas.eta * plan.meas.k * window);
    }
  }

  template <class Sink>
  void run(std::uint64_t seed, Sink&& sink) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = sys_.osc.size();
    std::vector<double> x(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      InitialState init;
      if (plan_.initial.size() == 1) init = plan_.initial[0];
      else if (plan_.initial.size() == n) init = plan_.initial[i];
      const double sd = plan_.noise_free ? 0.0 : std::sqrt(init.variance);
      x[i] = init.x_mean + sd * (sd > 0.0 ? normal(rng) : 0.0);
      p[i] = init.p_mean + sd * (sd > 0.0 ? normal(rng) : 0.0);
    }

    const std::size_t ng = sys_.groups.size();
    std::vector<double> rec(ng, 0.0);
    std::vector<double> out;
    const double dt = plan_.dt;

    auto store = [&](std::size_t step) {
      const double t = static_cast<double>(step) * dt;
      for (std::size_t g = 0; g < ng; ++g) {
        if (!record_) { rec[g] = 0.0; continue; }
        rec[g] = observable(sys_.groups[g], t, x, p);
        if (record_sigma_ > 0.0) rec[g] += record_sigma_ * normal(rng);
      }
      sys_.derive(t, x, p, rec, out);
      sink(step / plan_.stride, out);
    };

    store(0);
    std::vector<double> kick(ng);
    for (std::size_t step = 0; step < plan_.n_steps; ++step) {
      const double t = static_cast<double>(step) * dt;
      for (std::size_t g = 0; g < ng; ++g)
        kick[g] = backaction_ > 0.0 ? backaction_ * normal(rng) : 0.0;

      for (std::size_t i = 0; i < n; ++i) {
        const auto& pr = prop_[i];
        const double f = force_mid_[static_cast<std::size_t>(sys_.osc[i].force)][step] * dt;
        // exact homogeneous propagator; force applied at the midpoint
        const double xn = pr.c * x[i] + pr.s * p[i] + pr.sh * f;
        const double pn = -pr.s * x[i] + pr.c * p[i] + pr.ch * f;
        x[i] = xn;
        p[i] = pn;
        if (pr.thermal > 0.0) {
          x[i] += pr.thermal * normal(rng);
          p[i] += pr.thermal * normal(rng);
        }
      }
      for (std::size_t g = 0; g < ng; ++g) {
        if (kick[g] == 0.0) continue;
        for (const auto& m : sys_.groups[g]) {
          const double a = m.rate * t + m.phase;
          x[m.osc] += m.weight * std::sin(a) * kick[g];
          p[m.osc] += m.weight * std::cos(a) * kick[g];
        }
      }
      if ((step + 1) % plan_.stride == 0) store(step + 1);
    }
  }

 private:
  struct Prop {
    double c, s, ch, sh, thermal;
  };
  const SimulationPlan& plan_;
  const System& sys_;
  const std::vector<std::vector<double>>& force_mid_;
  std::vector<Prop> prop_;
  double backaction_ = 0.0;
  bool record_ = false;
  double record_sigma_ = 0.0;
};

std::vector<std::size_t> selected(const System& sys, const SimulationPlan& plan) {
  std::vector<std::size_t> idx;
  if (plan.channels.empty()) {
    for (std::size_t i = 0; i < sys.names.size(); ++i)
      if (sys.names[i] != "r" && sys.names[i].rfind("r_", 0) != 0) idx.push_back(i);
      else if (plan.wants_record()) idx.push_back(i);
    return idx;
  }
  for (const auto& c : plan.channels) {
    const auto it = std::find(sys.names.begin(), sys.names.end(), c);
    if (it == sys.names.end()) throw InvalidArgument("unknown channel '" + c + "'");
    idx.push_back(static_cast<std::size_t>(it - sys.names.begin()));
  }
  return idx;
}

std::vector<std::vector<double>> midpoint_forces(const SimulationPlan& plan) {
  return {plan.force1.sample(0.5 * plan.dt, plan.dt, plan.n_steps),
          plan.force2.sample(0.5 * plan.dt, plan.dt, plan.n_steps)};
}

std::size_t worker_count(const SimulationPlan& plan) {
  std::size_t t = plan.threads;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::min(t, std::max<std::size_t>(1, plan.n_trajectories));
}

// Runs fn(block) for every block index in [0, n_blocks) on a fixed pool.
template <class Fn>
void parallel_blocks(std::size_t n_blocks, std::size_t workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < n_blocks && !failed; b = next++) {
        try {
          fn(b);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

constexpr std::size_t kBlock = 64;

// Welford accumulator per (channel, sample).
struct Moments {
  std::size_t n = 0;
  std::vector<double> mean, m2;

  explicit Moments(std::size_t size = 0) : mean(size, 0.0), m2(size, 0.0) {}

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double tot = na + nb;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = o.mean[i] - mean[i];
      mean[i] += d * nb / tot;
      m2[i] += o.m2[i] + d * d * na * nb / tot;
    }
    n += o.n;
  }
};

}  // namespace

double SimulationPlan::max_dt() const {
  double f = params1.nu;
  double rate = std::max(params1.gamma, 8.0 * meas.k);
  if (params2) {
    f = std::max(f, params2->nu);
    rate = std::max(rate, params2->gamma);
  }
  f = std::max(f, std::abs(meas.rot_freq));
  // rotating quadratures advance at up to 2 nu (effective negative) or nu + Omega
  f = std::max(f, 2.0 * params1.nu);
  if (effective_freq) f = std::max(f, params1.nu + std::abs(*effective_freq));
  double lim = 2.0 * kPi / (20.0 * f);
  if (rate > 0.0) lim = std::min(lim, 1.0 / (20.0 * rate));
  return lim;
}

void SimulationPlan::validate() const {
  // Re-run the value-type invariants in case fields were assigned directly.
  (void)OscillatorParams(params1.nu, params1.gamma, params1.n_T);
  if (params2) (void)OscillatorParams(params2->nu, params2->gamma, params2->n_T);
  (void)MeasurementConfig(meas.k, meas.eta, meas.rot_freq, meas.phase);
  if (!(dt > 0.0)) throw InvalidArgument("plan: dt must be > 0");
  if (n_steps == 0) throw InvalidArgument("plan: n_steps must be >= 1");
  if (n_trajectories == 0) throw InvalidArgument("plan: n_trajectories must be >= 1");
  if (stride == 0) throw InvalidArgument("plan: stride must be >= 1");
  if (dt > max_dt() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "plan: dt = " << dt << " exceeds the ceiling " << max_dt()
       << " set by the fastest frequency or rate";
    throw InvalidArgument(os.str());
  }
  if (record && *record && meas.k == 0.0)
    throw InvalidArgument("plan: a measurement record requires k > 0");
  for (const auto& s : initial)
    if (!(s.variance >= 0.0)) throw InvalidArgument("plan: initial variance must be >= 0");
}

bool SimulationPlan::wants_record() const { return record.value_or(meas.k > 0.0); }

std::vector<double> EnsembleMoments::times() const {
  std::size_t n = mean.empty() ? 0 : mean.begin()->second.size();
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = static_cast<double>(j * stride) * dt;
  return t;
}

TrajectoryEnsemble simulate(const SimulationPlan& plan, Scheme scheme) {
  check_scheme(plan, scheme);
  const System sys = build_system(plan, scheme);
  const auto idx = selected(sys, plan);
  const auto forces = midpoint_forces(plan);
  const Integrator integ(plan, sys, forces);

  TrajectoryEnsemble ens;
  ens.dt = plan.dt;
  ens.n_steps = plan.n_steps;
  ens.stride = plan.stride;
  ens.trajectories.resize(plan.n_trajectories);
  ens.seeds.resize(plan.n_trajectories);
  const std::size_t ns = ens.n_samples();

  const std::size_t n_blocks = (plan.n_trajectories + kBlock - 1) / kBlock;
  parallel_blocks(n_blocks, worker_count(plan), [&](std::size_t b) {
    const std::size_t end = std::min(plan.n_trajectories, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const auto seed = trajectory_seed(plan.base_seed, i);
      ens.seeds[i] = seed;
      Trajectory tr;
      std::vector<std::vector<double>*> cols;
      for (auto c : idx) {
        auto& v = tr.channels[sys.names[c]];
        v.assign(ns, 0.0);
        cols.push_back(&v);
      }
      integ.run(seed, [&](std::size_t j, const std::vector<double>& vals) {
        for (std::size_t k = 0; k < idx.size(); ++k) (*cols[k])[j] = vals[idx[k]];
      });
      ens.trajectories[i] = std::move(tr);
    }
  });
  return ens;
}

EnsembleMoments simulate_moments(const SimulationPlan& plan, Scheme scheme) {
  check_scheme(plan, scheme);
  const System sys = build_system(plan, scheme);
  const auto idx = selected(sys, plan);
  const auto forces = midpoint_forces(plan);
  const Integrator integ(plan, sys, forces);

  const std::size_t ns = plan.n_steps / plan.stride + 1;
  const std::size_t nc = idx.size();
  const std::size_t n_blocks = (plan.n_trajectories + kBlock - 1) / kBlock;
  std::vector<Moments> blocks(n_blocks);

  parallel_blocks(n_blocks, worker_count(plan), [&](std::size_t b) {
    Moments acc(ns * nc);
    const std::size_t end = std::min(plan.n_trajectories, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      Moments one(ns * nc);
      one.n = 1;
      integ.run(trajectory_seed(plan.base_seed, i),
                [&](std::size_t j, const std::vector<double>& vals) {
                  for (std::size_t k = 0; k < nc; ++k) one.mean[k * ns + j] = vals[idx[k]];
                });
      acc.merge(one);
    }
    blocks[b] = std::move(acc);
  });

  Moments total(ns * nc);
  for (const auto& b : blocks) total.merge(b);

  EnsembleMoments out;
  out.dt = plan.dt;
  out.stride = plan.stride;
  out.count = total.n;
  for (std::size_t k = 0; k < nc; ++k) {
    const auto& name = sys.names[idx[k]];
    auto& m = out.mean[name];
    auto& v = out.variance[name];
    m.resize(ns);
    v.resize(ns);
    for (std::size_t j = 0; j < ns; ++j) {
      m[j] = total.mean[k * ns + j];
      v[j] = total.n > 1 ? total.m2[k * ns + j] / static_cast<double>(total.n - 1) : 0.0;
    }
  }
  return out;
}

TrajectoryEnsemble simulate_measured_oscillator(const SimulationPlan& plan) {
  return simulate(plan, Scheme::measured_oscillator);
}

TrajectoryEnsemble simulate_tc_pair(const SimulationPlan& plan) {
  return simulate(plan, Scheme::tc_pair);
}

TrajectoryEnsemble simulate_effective_negative(const SimulationPlan& plan) {
  return simulate(plan, Scheme::effective_negative);
}

TrajectoryEnsemble simulate_narrowband_quads(const SimulationPlan& plan) {
  return simulate(plan, Scheme::narrowband_quads);
}

}  // namespace qnc
