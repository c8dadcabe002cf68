// SPDX-License-Identifier: Apache-2.0
// pgrid: analytic evaluators, Monte Carlo twins and figure tables for the Poisson building model.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pgrid/pgrid.hpp"

using namespace pgrid;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

const std::vector<std::string> kMcCols{"mc_point", "mc_stderr", "mc_ci95_lo", "mc_ci95_hi"};

void append_mc(std::vector<std::string>& row, const Estimate& e) {
  const auto ci = e.ci95();
  row.insert(row.end(), {num(e.point), num(e.std_error), num(ci[0]), num(ci[1])});
}

std::vector<std::string> with_mc(std::vector<std::string> cols, bool mc) {
  if (mc) cols.insert(cols.end(), kMcCols.begin(), kMcCols.end());
  return cols;
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::optional<double> tol;
  std::optional<int> radius;
  bool mc = false;
};

void add_common(CLI::App* app, Options& o, bool mc = true) {
  app->add_option("--config", o.config, "RunConfig JSON file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Monte Carlo seed");
  app->add_option("--samples", o.samples, "Monte Carlo samples");
  app->add_option("--tol", o.tol, "series truncation tolerance");
  app->add_option("--radius", o.radius, "initial series truncation radius (rooms)");
  app->add_option("--out", o.out, "output path (default: config output, else stdout)");
  if (mc) app->add_flag("--mc", o.mc, "add Monte Carlo columns");
}

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? config_from_json(nlohmann::json::object()) : load_config(o.config);
  if (o.seed) c.sim.seed = *o.seed;
  if (o.samples) c.sim.samples = *o.samples;
  if (o.tol) c.series.tol = *o.tol;
  if (o.radius) {
    c.series.radius = *o.radius;
    c.series.max_radius = std::max(c.series.max_radius, *o.radius);
  }
  c.validate();
  return c;
}

void write(const Table& t, const RunConfig& c, const Options& o) {
  const std::string path = !o.out.empty() ? o.out : c.output;
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw config_error("cannot write " + path);
  }
  std::ostream& os = path.empty() ? std::cout : file;
  os << "# pgrid " << kVersion << "\n# config: " << to_json(c).dump() << "\n";
  for (std::size_t i = 0; i < t.cols.size(); ++i) os << (i ? "," : "") << t.cols[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

void warn(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

SimConfig sim_for(const RunConfig& c, Perspective persp) {
  SimConfig s = c.sim;
  s.perspective = persp;
  return s;
}

double k_of_db(double db) { return std::isinf(db) ? 0.0 : db_to_linear(db); }
std::string db_label(double db) { return std::isinf(db) ? "-inf" : num(db); }

// ---- analytic subcommands ----

Table cmd_moments(const RunConfig& c, bool mc) {
  Table t{with_mc({"perspective", "quantity", "value"}, mc), {}};
  const auto& p = c.params;
  std::optional<InterferenceRun> room, user;
  if (mc) {
    room = sim_interference(p, sim_for(c, Perspective::TypicalRoom), Channel::NoFading);
    user = sim_interference(p, sim_for(c, Perspective::TypicalUser), Channel::NoFading);
    warn(room->warnings);
    warn(user->warnings);
  }
  auto row = [&](const char* persp, const char* q, double v, std::optional<Estimate> e) {
    std::vector<std::string> r{persp, q, num(v)};
    if (mc) append_mc(r, *e);
    t.add(r);
  };
  row("room", "mean", mean_room(p), mc ? std::optional(room->mean()) : std::nullopt);
  row("room", "variance", variance_room(p), mc ? std::optional(room->variance()) : std::nullopt);
  row("user", "mean", mean_user(p), mc ? std::optional(user->mean()) : std::nullopt);
  row("user", "variance", variance_user(p), mc ? std::optional(user->variance()) : std::nullopt);
  if (!c.room.is_origin()) {
    std::optional<Estimate> cov;
    if (mc) cov = sim_pair_interference(p, sim_for(c, Perspective::TypicalRoom), c.room).covariance();
    row("room", "covariance", covariance_room(p, c.room), cov);
    std::vector<std::string> r{"room", "correlation", num(corr_coeff(p, c.room))};
    if (mc) r.insert(r.end(), {"", "", "", ""});
    t.add(r);
  }
  return t;
}

Table cmd_laplace(const RunConfig& c, bool mc) {
  Table t{with_mc({"perspective", "channel", "s", "value", "error_bound"}, mc), {}};
  std::optional<InterferenceRun> run;
  if (mc) {
    run = sim_interference(c.params, c.sim, c.channel);
    warn(run->warnings);
  }
  for (double s : c.s) {
    const auto v = pgrid::laplace(LaplaceQuery{s, c.channel, c.sim.perspective, {}, {}}, c.params, c.series);
    std::vector<std::string> r{to_string(c.sim.perspective), to_string(c.channel), num(s), num(v.value),
                               num(v.error_bound)};
    if (mc) append_mc(r, run->laplace(s));
    t.add(r);
  }
  return t;
}

Table cmd_success(const RunConfig& c, bool mc) {
  Table t{with_mc({"theta_db", "success"}, mc), {}};
  std::vector<Estimate> est;
  if (mc) {
    SuccessQuery q{SuccessMode::D2DSingle, c.room, c.nu, c.sigma2, {}};
    auto run = sim_success(c.params, c.sim, q, c.thetas());
    warn(run.warnings);
    est = run.curve;
  }
  const auto th = c.thetas();
  for (std::size_t i = 0; i < th.size(); ++i) {
    std::vector<std::string> r{num(c.theta_db[i]), num(success_d2d(LinkQuery{th[i], c.nu, c.sigma2, c.room}, c.params, c.series))};
    if (mc) append_mc(r, est[i]);
    t.add(r);
  }
  return t;
}

std::vector<double> joint_curve(const GridParams& p, const RunConfig& c, const RoomIndex& room) {
  std::vector<double> out;
  for (double th : c.thetas()) out.push_back(joint_success_d2d(th, th, c.nu, p, room, c.sigma2, c.sigma2, c.series));
  return out;
}

Table cmd_joint(const RunConfig& c, bool mc) {
  if (c.room.is_origin()) throw config_error("joint-success: room must differ from the typical room");
  Table t{with_mc({"theta_db", "joint_success"}, mc), {}};
  std::vector<Estimate> est;
  if (mc) {
    SuccessQuery q{SuccessMode::D2DJoint, c.room, c.nu, c.sigma2, {}};
    auto run = sim_success(c.params, c.sim, q, c.thetas());
    warn(run.warnings);
    est = run.curve;
  }
  const auto v = joint_curve(c.params, c, c.room);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::vector<std::string> r{num(c.theta_db[i]), num(v[i])};
    if (mc) append_mc(r, est[i]);
    t.add(r);
  }
  return t;
}

CoverageValue coverage_value(const std::string& assoc, double th, const GridParams& p, double sigma2,
                             const SeriesControl& ctrl) {
  if (assoc == "strongest") return coverage_strongest(th, p, sigma2, ctrl);
  if (assoc == "nearest") return coverage_nearest_asymptotic(th, p, sigma2, ctrl);
  return coverage_nearest(th, p, sigma2, ctrl);
}

std::vector<Estimate> coverage_mc(const std::string& assoc, const GridParams& p, const RunConfig& c) {
  SuccessQuery q;
  q.mode = assoc == "strongest" ? SuccessMode::Strongest : SuccessMode::Nearest;
  q.sigma2 = c.sigma2;
  auto run = sim_success(p, c.sim, q, c.thetas());
  warn(run.warnings);
  return run.curve;
}

Table cmd_coverage(const RunConfig& c, const std::string& assoc, bool mc) {
  Table t{with_mc({"assoc", "theta_db", "coverage", "tag", "error_bound"}, mc), {}};
  std::vector<Estimate> est;
  if (mc) est = coverage_mc(assoc, c.params, c);
  const auto th = c.thetas();
  for (std::size_t i = 0; i < th.size(); ++i) {
    const auto v = coverage_value(assoc, th[i], c.params, c.sigma2, c.series);
    std::vector<std::string> r{assoc, num(c.theta_db[i]), num(v.value), to_string(v.tag), num(v.error_bound)};
    if (mc) append_mc(r, est[i]);
    t.add(r);
  }
  return t;
}

double building_laplace(const RunConfig& c, const GridParams& p, double s) {
  switch (c.scenario.kind) {
    case ScenarioKind::FiniteBuilding:
      return finite_building_laplace(s, p, c.scenario.extents, c.scenario.oob, c.series);
    case ScenarioKind::SemiInfinite:
      return semi_infinite_laplace(s, p, c.scenario.d, c.series);
    default:
      return laplace_user(s, p, Channel::Rayleigh, c.series);
  }
}

InterferenceRun building_mc(const RunConfig& c, const GridParams& p) {
  switch (c.scenario.kind) {
    case ScenarioKind::FiniteBuilding:
      return sim_finite_building(p, c.sim, c.scenario.extents, c.scenario.oob);
    case ScenarioKind::SemiInfinite:
      return sim_semi_infinite(p, c.sim, c.scenario.d);
    default:
      return sim_interference(p, sim_for(c, Perspective::TypicalUser), Channel::Rayleigh);
  }
}

Table cmd_finite(const RunConfig& c, bool mc) {
  if (c.scenario.kind == ScenarioKind::WindowOffice) throw config_error("finite: use the window subcommand");
  Table t{with_mc({"scenario", "s", "laplace"}, mc), {}};
  std::optional<InterferenceRun> run;
  if (mc) {
    run = building_mc(c, c.params);
    warn(run->warnings);
  }
  for (double s : c.s) {
    std::vector<std::string> r{to_string(c.scenario.kind), num(s), num(building_laplace(c, c.params, s))};
    if (mc) append_mc(r, run->laplace(s));
    t.add(r);
  }
  return t;
}

Table cmd_window(const RunConfig& c, bool mc) {
  Table t{with_mc({"theta_db", "success"}, mc), {}};
  const auto w = c.window();
  const auto th = c.thetas();
  std::vector<Estimate> est;
  if (mc) est = sim_window_success(c.params, c.sim, w, c.room, th, c.sigma2);
  for (std::size_t i = 0; i < th.size(); ++i) {
    std::vector<std::string> r{num(c.theta_db[i]), num(window_success(th[i], c.params, c.room, c.sigma2, w, c.series))};
    if (mc) append_mc(r, est[i]);
    t.add(r);
  }
  return t;
}

// Free-space PPP against the Poisson building at matched average BS density.
Table freespace_table(const RunConfig& c, const std::vector<double>& densities, const std::vector<double>& alphas,
                      const std::vector<double>& k_db, bool mc) {
  Table t{with_mc({"family", "param", "density", "theta_db", "coverage"}, mc), {}};
  const auto th = c.thetas();
  for (double a : alphas)
    for (double d : densities) {
      const FreeSpaceParams fs{d, a};
      std::vector<Estimate> est;
      if (mc) est = sim_freespace(fs, c.sim, th);
      for (std::size_t i = 0; i < th.size(); ++i) {
        std::vector<std::string> r{"freespace", "alpha=" + num(a), num(d), num(c.theta_db[i]),
                                   num(freespace_coverage(th[i], fs))};
        if (mc) append_mc(r, est[i]);
        t.add(r);
      }
    }
  for (double kd : k_db)
    for (double d : densities) {
      GridParams p = c.params;
      for (auto& k : p.k) k = k_of_db(kd);
      const double base = avg_density(p);
      if (!(base > 0.0)) throw config_error("compare-freespace: params need a positive BS density");
      for (auto& l : p.lambda) l *= d / base;
      std::vector<Estimate> est;
      if (mc) est = coverage_mc("nearest", p, c);
      for (std::size_t i = 0; i < th.size(); ++i) {
        std::vector<std::string> r{"building", "K_dB=" + db_label(kd), num(d), num(c.theta_db[i]),
                                   num(coverage_nearest(th[i], p, 0.0, c.series).value)};
        if (mc) append_mc(r, est[i]);
        t.add(r);
      }
    }
  return t;
}

Table cmd_simulate(const RunConfig& c) {
  Table t{{"scenario", "quantity", "point", "stderr", "ci95_lo", "ci95_hi"}, {}};
  InterferenceRun run;
  switch (c.scenario.kind) {
    case ScenarioKind::Infinite:
      run = sim_interference(c.params, c.sim, c.channel);
      break;
    case ScenarioKind::WindowOffice:
      run = sim_window(c.params, c.sim, c.window());
      break;
    default:
      run = building_mc(c, c.params);
  }
  warn(run.warnings);
  auto row = [&](const std::string& q, const Estimate& e) {
    std::vector<std::string> r{to_string(c.scenario.kind), q};
    append_mc(r, e);
    t.add(r);
  };
  row("mean", run.mean());
  row("variance", run.variance());
  for (double s : c.s) row("laplace(s=" + num(s) + ")", run.laplace(s));
  return t;
}

// ---- figure recipes ----

const std::vector<double> kFigKdb{-std::numeric_limits<double>::infinity(), -20.0, -10.0, -5.0, -3.0};

std::vector<double> db_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double x = lo; x <= hi + 1e-9; x += step) g.push_back(x);
  return g;
}

Table fig3(const RunConfig& c, bool mc) {
  Table t{with_mc({"n", "r", "K_dB", "mean_room"}, mc), {}};
  for (std::size_t n : {2u, 3u})
    for (double r : {0.05, 0.1, 0.2})
      for (double kd : db_grid(-30.0, -1.0, 1.0)) {
        const auto p = GridParams::uniform(n, 1.0, r, k_of_db(kd));
        std::vector<std::string> row{std::to_string(n), num(r), num(kd), num(mean_room(p))};
        if (mc) append_mc(row, sim_interference(p, sim_for(c, Perspective::TypicalRoom), Channel::NoFading).mean());
        t.add(row);
      }
  return t;
}

Table fig4(const RunConfig& c, bool mc) {
  Table t{with_mc({"family", "K_dB", "delta", "rho"}, mc), {}};
  for (double kd : {-std::numeric_limits<double>::infinity(), -20.0, -10.0})
    for (const char* fam : {"(0,0,d)", "(d,d,d)"})
      for (long d = 0; d <= 10; ++d) {
        const auto p = GridParams::uniform(3, 1.0, 0.1, k_of_db(kd));
        const RoomIndex room = fam[1] == '0' ? RoomIndex{{0, 0, d}} : RoomIndex{{d, d, d}};
        std::vector<std::string> row{fam, db_label(kd), std::to_string(d), num(corr_coeff(p, room))};
        if (mc) {
          // correlation from the covariance estimate over the pooled variance
          auto run = sim_pair_interference(p, sim_for(c, Perspective::TypicalRoom), room);
          const auto cov = run.covariance();
          const double v = std::sqrt(variance_estimate(run.i0).point * variance_estimate(run.i1).point);
          append_mc(row, Estimate{cov.point / v, cov.std_error / v, cov.samples});
        }
        t.add(row);
      }
  return t;
}

RunConfig with_grid(RunConfig c, std::vector<double> theta_db) {
  c.theta_db = std::move(theta_db);
  return c;
}

Table fig7(const RunConfig& base, bool mc) {
  const RunConfig c = with_grid(base, db_grid(-10.0, 30.0, 2.0));
  Table t{with_mc({"K_dB", "theta_db", "success"}, mc), {}};
  for (double kd : kFigKdb) {
    const auto p = GridParams::uniform(3, 1.0, 0.1, k_of_db(kd));
    std::vector<Estimate> est;
    if (mc) est = sim_success(p, c.sim, SuccessQuery{}, c.thetas()).curve;
    const auto th = c.thetas();
    for (std::size_t i = 0; i < th.size(); ++i) {
      std::vector<std::string> row{db_label(kd), num(c.theta_db[i]),
                                   num(success_d2d(LinkQuery{th[i], 1.0, 0.0, RoomIndex::origin(3)}, p, c.series))};
      if (mc) append_mc(row, est[i]);
      t.add(row);
    }
  }
  return t;
}

Table fig8(const RunConfig& base, bool mc) {
  const RunConfig c = with_grid(base, db_grid(-10.0, 30.0, 2.0));
  const RoomIndex room{{1, 0, 0}};
  Table t{with_mc({"K_dB", "theta_db", "joint_success"}, mc), {}};
  for (double kd : kFigKdb) {
    const auto p = GridParams::uniform(3, 1.0, 0.1, k_of_db(kd));
    std::vector<Estimate> est;
    if (mc) est = sim_success(p, c.sim, SuccessQuery{SuccessMode::D2DJoint, room, 1.0, 0.0, {}}, c.thetas()).curve;
    const auto v = joint_curve(p, c, room);
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::vector<std::string> row{db_label(kd), num(c.theta_db[i]), num(v[i])};
      if (mc) append_mc(row, est[i]);
      t.add(row);
    }
  }
  return t;
}

Table coverage_fig(const RunConfig& base, const std::string& assoc, const std::vector<std::pair<double, double>>& rk,
                   bool mc) {
  const RunConfig c = with_grid(base, db_grid(-10.0, 20.0, 2.0));
  Table t{with_mc({"assoc", "r", "K_dB", "theta_db", "coverage", "tag"}, mc), {}};
  for (auto [r, kd] : rk) {
    const auto p = GridParams::uniform(3, 1.0, r, k_of_db(kd));
    std::vector<Estimate> est;
    if (mc) est = coverage_mc(assoc, p, c);
    const auto th = c.thetas();
    for (std::size_t i = 0; i < th.size(); ++i) {
      const auto v = coverage_value(assoc, th[i], p, 0.0, c.series);
      std::vector<std::string> row{assoc, num(r), db_label(kd), num(c.theta_db[i]), num(v.value), to_string(v.tag)};
      if (mc) append_mc(row, est[i]);
      t.add(row);
    }
  }
  return t;
}

Table fig10(const RunConfig& base, bool mc) {
  auto a = coverage_fig(base, "nearest", {{0.1, -10.0}, {0.5, -10.0}, {1.0, -10.0}}, mc);
  auto b = coverage_fig(base, "nearest-exact", {{0.1, -10.0}, {0.5, -10.0}, {1.0, -10.0}}, false);
  for (auto& r : b.rows) {
    if (mc) r.insert(r.end(), {"", "", "", ""});
    a.rows.push_back(r);
  }
  return a;
}

Table fig13(const RunConfig& base, bool mc) {
  Table t{with_mc({"K", "s", "laplace_semi_infinite", "laplace_infinite"}, mc), {}};
  RunConfig c = base;
  std::vector<double> s;
  for (double e = -2.0; e <= 2.0 + 1e-9; e += 0.25) s.push_back(std::pow(10.0, e));
  for (double k : {0.1, 0.3}) {
    const auto p = GridParams::uniform(3, 1.0, 0.1, k);
    std::optional<InterferenceRun> run;
    if (mc) run = sim_semi_infinite(p, c.sim, 3.0);
    for (double x : s) {
      std::vector<std::string> row{num(k), num(x), num(semi_infinite_laplace(x, p, 3.0, c.series)),
                                   num(laplace_user(x, p, Channel::Rayleigh, c.series))};
      if (mc) append_mc(row, run->laplace(x));
      t.add(row);
    }
  }
  return t;
}

Table fig15(const RunConfig& base, bool mc) {
  const RunConfig c = with_grid(base, db_grid(-10.0, 20.0, 2.0));
  Table t{with_mc({"K_dB", "lw_dB", "theta_db", "success"}, mc), {}};
  const RoomIndex origin = RoomIndex::origin(3);
  std::vector<std::pair<double, double>> curves;
  for (double kd : kFigKdb) curves.push_back({kd, -3.0});
  curves.push_back({-5.0, -std::numeric_limits<double>::infinity()});
  curves.push_back({-20.0, -std::numeric_limits<double>::infinity()});
  for (auto [kd, lwd] : curves) {
    GridParams p = GridParams::uniform(3, 1.0, 0.1, k_of_db(kd));
    p.k[2] = 0.0;
    const auto w = WindowModel::geometric(0.5, k_of_db(lwd));
    const auto th = c.thetas();
    std::vector<Estimate> est;
    if (mc) est = sim_window_success(p, c.sim, w, origin, th);
    for (std::size_t i = 0; i < th.size(); ++i) {
      std::vector<std::string> row{db_label(kd), db_label(lwd), num(c.theta_db[i]),
                                   num(window_success(th[i], p, origin, 0.0, w, c.series))};
      if (mc) append_mc(row, est[i]);
      t.add(row);
    }
  }
  return t;
}

Table cmd_fig(int id, const RunConfig& c, bool mc) {
  switch (id) {
    case 3: return fig3(c, mc);
    case 4: return fig4(c, mc);
    case 7: return fig7(c, mc);
    case 8: return fig8(c, mc);
    case 9: return coverage_fig(c, "strongest", {{0.1, -20.0}, {0.1, -10.0}, {0.1, -5.0}}, mc);
    case 10: return fig10(c, mc);
    case 11: {
      const RunConfig g = with_grid(c, {0.0});
      RunConfig u = g;
      u.params = GridParams::uniform(3, 1.0, 0.1, 0.1);
      return freespace_table(u, {0.1, 0.2, 0.4, 0.8, 1.2}, {3.5, 4.0}, {-10.0, -20.0}, mc);
    }
    case 13: return fig13(c, mc);
    case 15: return fig15(c, mc);
  }
  throw config_error("fig: unknown figure " + std::to_string(id));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pgrid: Poisson grid / Poisson building interference toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* sample = app.add_subcommand("sample-grid", "sample a grid realization and print it as JSON");
  add_common(sample, o, false);
  double halfwidth = 5.0;
  sample->add_option("--halfwidth", halfwidth, "cube half-width of the sampling window")->check(CLI::PositiveNumber);

  auto* moments = app.add_subcommand("moments", "interference mean, variance and room covariance");
  add_common(moments, o);
  auto* lap = app.add_subcommand("laplace", "Laplace transform of the interference over the s grid");
  add_common(lap, o);
  auto* succ = app.add_subcommand("success", "D2D link success probability over the theta grid");
  add_common(succ, o);
  auto* joint = app.add_subcommand("joint-success", "joint success of links in the typical room and `room`");
  add_common(joint, o);
  auto* cov = app.add_subcommand("coverage", "cellular coverage probability");
  add_common(cov, o);
  std::string assoc = "strongest";
  cov->add_option("--assoc", assoc, "association rule")
      ->check(CLI::IsMember({"strongest", "nearest", "nearest-exact"}));
  auto* fin = app.add_subcommand("finite", "Laplace transform in a finite or semi-infinite building");
  add_common(fin, o);
  auto* win = app.add_subcommand("window", "window-office link success probability");
  add_common(win, o);
  auto* fs = app.add_subcommand("compare-freespace", "free-space PPP vs Poisson building coverage over density");
  add_common(fs, o);
  std::vector<double> densities{0.1, 0.4, 1.2}, alphas{3.5, 4.0}, kdb{-10.0, -20.0};
  fs->add_option("--densities", densities, "average BS densities");
  fs->add_option("--alpha", alphas, "free-space path loss exponents");
  fs->add_option("--k-db", kdb, "building penetration losses (dB)");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo summary of the configured scenario");
  add_common(sim, o, false);
  auto* fig = app.add_subcommand("fig", "figure table");
  add_common(fig, o);
  int fig_id = 0;
  fig->add_option("id", fig_id, "figure number")->required()->check(CLI::IsMember({3, 4, 7, 8, 9, 10, 11, 13, 15}));
  auto* check = app.add_subcommand("check-config", "validate a config and print the resolved document");
  check->add_option("--config", o.config, "RunConfig JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig c = resolve(o);
    if (check->parsed()) {
      std::cout << to_json(c).dump(2) << "\n";
      return 0;
    }
    if (sample->parsed()) {
      const auto g = sample_realization(c.params, std::vector<Interval>(c.params.dim(), Interval{-halfwidth, halfwidth}),
                                        c.sim.seed);
      const std::string path = !o.out.empty() ? o.out : c.output;
      if (path.empty()) {
        std::cout << pgrid::to_json(g).dump() << "\n";
      } else {
        std::ofstream f(path);
        if (!f) throw config_error("cannot write " + path);
        f << pgrid::to_json(g).dump() << "\n";
      }
      return 0;
    }
    Table t;
    if (moments->parsed()) t = cmd_moments(c, o.mc);
    else if (lap->parsed()) t = cmd_laplace(c, o.mc);
    else if (succ->parsed()) t = cmd_success(c, o.mc);
    else if (joint->parsed()) t = cmd_joint(c, o.mc);
    else if (cov->parsed()) t = cmd_coverage(c, assoc, o.mc);
    else if (fin->parsed()) t = cmd_finite(c, o.mc);
    else if (win->parsed()) t = cmd_window(c, o.mc);
    else if (fs->parsed()) t = freespace_table(c, densities, alphas, kdb, o.mc);
    else if (sim->parsed()) t = cmd_simulate(c);
    else if (fig->parsed()) t = cmd_fig(fig_id, c, o.mc);
    write(t, c, o);
  } catch (const convergence_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
