#include "fpl/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

#include "fpl/errors.hpp"

namespace fpl {

namespace {

constexpr double kTol = PiecewiseLinear::kTimeTol;
constexpr double kContinuityTol = 1e-9;
constexpr size_t kMaxSegments = 10000;

} // namespace

RestrictedHybridAutomaton::RestrictedHybridAutomaton(
    std::vector<HybridLocation> locations, std::vector<HybridEdge> edges,
    int init_location, Eigen::VectorXd init_point, double horizon)
    : locations_(std::move(locations)), edges_(std::move(edges)),
      init_location_(init_location), init_point_(std::move(init_point)),
      horizon_(horizon) {
  if (locations_.empty())
    throw DomainError("automaton needs at least one location");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw DomainError("automaton horizon must be positive and finite");
  int dim = static_cast<int>(locations_.front().evolution.size());
  std::set<std::string> names;
  for (const HybridLocation &loc : locations_) {
    if (loc.name.empty())
      throw DomainError("location without a name");
    if (!names.insert(loc.name).second)
      throw DomainError("duplicate location name '" + loc.name + "'");
    if (static_cast<int>(loc.evolution.size()) != dim || dim == 0)
      throw DomainError("location '" + loc.name +
                        "' disagrees on signal dimension");
    if (!(loc.max_dwell > 0.0) || !std::isfinite(loc.max_dwell))
      throw DomainError("location '" + loc.name +
                        "' needs a positive, finite max dwell");
    for (const PiecewiseLinear &f : loc.evolution) {
      if (f.is_infinite())
        throw DomainError("location '" + loc.name +
                          "' has an infinite evolution");
      if (std::abs(f.t_min()) > kTol ||
          std::abs(f.t_max() - loc.max_dwell) > kTol)
        throw DomainError("location '" + loc.name +
                          "' evolution must span [0, max dwell]");
    }
  }
  int n = static_cast<int>(locations_.size());
  for (const HybridEdge &e : edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw DomainError("edge endpoint is not a location");
    const HybridLocation &src = locations_[static_cast<size_t>(e.from)];
    const HybridLocation &dst = locations_[static_cast<size_t>(e.to)];
    double prev = 0.0;
    for (double t : e.jump_times) {
      if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("jump times must be positive (edge '" + e.action +
                          "')");
      if (t <= prev)
        throw DomainError("jump times must ascend (edge '" + e.action + "')");
      if (t > src.max_dwell + kTol)
        throw DomainError("jump time past the max dwell of '" + src.name +
                          "'");
      prev = t;
      // No resets: the signal may not move during the switch.
      for (int d = 0; d < dim; ++d) {
        double leave = src.evolution[d].eval(std::min(t, src.max_dwell));
        double enter = dst.evolution[d].eval(0.0);
        if (std::abs(leave - enter) > kContinuityTol)
          throw DomainError("jump from '" + src.name + "' to '" + dst.name +
                            "' tears the signal");
      }
    }
  }
  if (init_location_ < 0 || init_location_ >= n)
    throw DomainError("initial location out of range");
  if (static_cast<int>(init_point_.size()) != dim)
    throw DomainError("initial point disagrees on signal dimension");
  const HybridLocation &first =
      locations_[static_cast<size_t>(init_location_)];
  for (int d = 0; d < dim; ++d)
    if (std::abs(init_point_(d) - first.evolution[d].eval(0.0)) >
        kContinuityTol)
      throw DomainError("initial point does not match the initial evolution");
}

namespace {

using nlohmann::ordered_json;

PiecewiseLinear parse_evolution_plf(const ordered_json &j,
                                    const std::string &ctx) {
  if (!j.is_array() || j.empty())
    throw ParseError(ctx + ": expected a non-empty [[t, v], ...] array");
  std::vector<PiecewiseLinear::Breakpoint> pts;
  for (const auto &p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number())
      throw ParseError(ctx + ": breakpoint must be [time, value]");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  try {
    return PiecewiseLinear(std::move(pts));
  } catch (const Error &e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

const ordered_json &field(const ordered_json &j, const char *key,
                          const std::string &ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(ctx + ": missing \"" + key + "\"");
  return *it;
}

} // namespace

RestrictedHybridAutomaton parse_automaton(const std::string &json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("automaton JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError("automaton JSON: expected an object");

  const ordered_json &jlocs = field(j, "locations", "automaton");
  if (!jlocs.is_array() || jlocs.empty())
    throw ParseError("automaton: \"locations\" must be a non-empty array");
  std::vector<HybridLocation> locations;
  std::map<std::string, int> index;
  for (const auto &jl : jlocs) {
    HybridLocation loc;
    const ordered_json &jname = field(jl, "name", "location");
    if (!jname.is_string())
      throw ParseError("location: \"name\" must be a string");
    loc.name = jname.get<std::string>();
    const ordered_json &jevo = field(jl, "evolution", "location " + loc.name);
    if (!jevo.is_array() || jevo.empty())
      throw ParseError("location " + loc.name +
                       ": \"evolution\" must be a non-empty array");
    for (const auto &jf : jevo)
      loc.evolution.push_back(
          parse_evolution_plf(jf, "location " + loc.name));
    const ordered_json &jd = field(jl, "maxDwell", "location " + loc.name);
    if (!jd.is_number())
      throw ParseError("location " + loc.name +
                       ": \"maxDwell\" must be a number");
    loc.max_dwell = jd.get<double>();
    index.emplace(loc.name, static_cast<int>(locations.size()));
    locations.push_back(std::move(loc));
  }

  auto resolve = [&](const ordered_json &v, const char *what) {
    if (!v.is_string())
      throw ParseError(std::string(what) + " must name a location");
    auto it = index.find(v.get<std::string>());
    if (it == index.end())
      throw ParseError("unknown location '" + v.get<std::string>() + "'");
    return it->second;
  };

  std::vector<HybridEdge> edges;
  if (auto it = j.find("edges"); it != j.end()) {
    if (!it->is_array())
      throw ParseError("automaton: \"edges\" must be an array");
    for (const auto &je : *it) {
      HybridEdge e;
      e.from = resolve(field(je, "from", "edge"), "edge \"from\"");
      e.to = resolve(field(je, "to", "edge"), "edge \"to\"");
      const ordered_json &ja = field(je, "action", "edge");
      if (!ja.is_string())
        throw ParseError("edge: \"action\" must be a string");
      e.action = ja.get<std::string>();
      const ordered_json &jt = field(je, "jumpTimes", "edge " + e.action);
      if (!jt.is_array())
        throw ParseError("edge " + e.action +
                         ": \"jumpTimes\" must be an array");
      for (const auto &v : jt) {
        if (!v.is_number())
          throw ParseError("edge " + e.action + ": jump times are numbers");
        e.jump_times.push_back(v.get<double>());
      }
      edges.push_back(std::move(e));
    }
  }

  const ordered_json &jinit = field(j, "init", "automaton");
  int init_loc = resolve(field(jinit, "location", "init"), "init location");
  const ordered_json &jp = field(jinit, "point", "init");
  if (!jp.is_array() || jp.empty())
    throw ParseError("init: \"point\" must be a non-empty array");
  Eigen::VectorXd point(jp.size());
  for (size_t d = 0; d < jp.size(); ++d) {
    if (!jp[d].is_number())
      throw ParseError("init: point entries are numbers");
    point(static_cast<Eigen::Index>(d)) = jp[d].get<double>();
  }

  const ordered_json &jh = field(j, "horizon", "automaton");
  if (!jh.is_number())
    throw ParseError("automaton: \"horizon\" must be a number");

  return RestrictedHybridAutomaton(std::move(locations), std::move(edges),
                                   init_loc, std::move(point),
                                   jh.get<double>());
}

namespace {

struct Segment {
  int location;
  double duration;
};

Trajectory assemble_run(const RestrictedHybridAutomaton &ha,
                        const std::vector<Segment> &segments,
                        double horizon) {
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> ps;
  int dim = ha.dim();
  double base = 0.0;
  for (const Segment &seg : segments) {
    const HybridLocation &loc =
        ha.locations()[static_cast<size_t>(seg.location)];
    std::vector<double> local{0.0, seg.duration};
    for (const PiecewiseLinear &f : loc.evolution)
      for (const auto &bp : f.breakpoints())
        if (bp.t > kTol && bp.t < seg.duration - kTol)
          local.push_back(bp.t);
    std::sort(local.begin(), local.end());
    for (double s : local) {
      if (!ts.empty() && base + s <= ts.back() + kTol) {
        // Seam between segments: the no-reset rule makes it one point.
        Eigen::VectorXd v(dim);
        for (int d = 0; d < dim; ++d)
          v(d) = loc.evolution[d].eval(s);
        if ((v - ps.back()).lpNorm<Eigen::Infinity>() > kContinuityTol)
          throw DomainError("run tears at a jump");
        continue;
      }
      Eigen::VectorXd v(dim);
      for (int d = 0; d < dim; ++d)
        v(d) = loc.evolution[d].eval(s);
      ts.push_back(base + s);
      ps.push_back(v);
    }
    base += seg.duration;
  }
  // The durations sum to the horizon by construction; land on it exactly
  // rather than a rounding hair away.
  ts.back() = horizon;
  return Trajectory(std::move(ts), std::move(ps));
}

void enumerate_rec(const RestrictedHybridAutomaton &ha, int loc,
                   double remaining, double horizon, int cap,
                   std::vector<Segment> &segments,
                   std::vector<Trajectory> &out) {
  if (segments.size() >= kMaxSegments)
    throw CapacityError("run exceeds the segment limit");
  const HybridLocation &here = ha.locations()[static_cast<size_t>(loc)];
  if (remaining <= here.max_dwell + kTol) {
    if (static_cast<int>(out.size()) >= cap)
      throw CapacityError("automaton admits more runs than the cap");
    segments.push_back({loc, remaining});
    out.push_back(assemble_run(ha, segments, horizon));
    segments.pop_back();
  }
  for (const HybridEdge &e : ha.edges()) {
    if (e.from != loc)
      continue;
    for (double t : e.jump_times) {
      // A jump at or past the horizon adds nothing beyond dwelling out.
      if (t >= remaining - kTol)
        continue;
      segments.push_back({loc, t});
      enumerate_rec(ha, e.to, remaining - t, horizon, cap, segments, out);
      segments.pop_back();
    }
  }
}

} // namespace

std::vector<Trajectory> enumerate_runs(const RestrictedHybridAutomaton &ha,
                                       double horizon, int cap) {
  if (!(horizon > kTol) || horizon > ha.horizon() + kTol)
    throw DomainError("run horizon must lie in (0, automaton horizon]");
  if (cap < 1)
    throw DomainError("run cap must be at least one");
  std::vector<Segment> segments;
  std::vector<Trajectory> out;
  enumerate_rec(ha, ha.init_location(), horizon, horizon, cap, segments, out);
  return out;
}

ModelCheckResult model_check(const RestrictedHybridAutomaton &ha,
                             const FormulaPtr &f, ExtendedDistance threshold,
                             const SemanticsConfig &cfg, int cap) {
  std::vector<Trajectory> runs = enumerate_runs(ha, ha.horizon(), cap);
  if (runs.empty())
    throw DomainError("automaton admits no run of its whole horizon");
  ModelCheckResult res;
  res.all_within = true;
  for (size_t i = 0; i < runs.size(); ++i) {
    ExtendedDistance d = compute_semantics(runs[i], f, cfg);
    double b = error_bound(f, runs[i], cfg) + quadrature_bound(f, runs[i], cfg);
    if (!(d <= threshold + ExtendedDistance(b)))
      res.all_within = false;
    if (res.worst_run < 0 ||
        res.distances[static_cast<size_t>(res.worst_run)] < d)
      res.worst_run = static_cast<int>(i);
    if (res.best_run < 0 || d < res.distances[static_cast<size_t>(res.best_run)])
      res.best_run = static_cast<int>(i);
    res.distances.push_back(d);
    res.bounds.push_back(b);
  }
  return res;
}

} // namespace fpl
