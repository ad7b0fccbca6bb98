#include "fpl/catalog.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "fpl/errors.hpp"
#include "fpl/format.hpp"

namespace fpl {

namespace {

using nlohmann::ordered_json;

bool valid_identifier(const std::string &s) {
  if (s.empty())
    return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      return false;
  // U_ would be swallowed by the until-with-interval syntax
  return s != "U" && s != "F" && s != "TOP" && s != "U_";
}

double plf_value(const ordered_json &v, const std::string &ctx) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw ParseError(ctx + ": the only string value allowed is \"inf\"");
  }
  if (!v.is_number())
    throw ParseError(ctx + ": expected a number or \"inf\"");
  return v.get<double>();
}

PiecewiseLinear parse_plf(const ordered_json &j, const std::string &ctx) {
  if (!j.is_array() || j.empty())
    throw ParseError(ctx + ": expected a non-empty [[t, v], ...] array");
  std::vector<PiecewiseLinear::Breakpoint> pts;
  for (const auto &p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number())
      throw ParseError(ctx + ": breakpoint must be [time, value]");
    pts.push_back({p[0].get<double>(), plf_value(p[1], ctx)});
  }
  try {
    return PiecewiseLinear(std::move(pts));
  } catch (const Error &e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

ordered_json emit_plf(const PiecewiseLinear &f) {
  ordered_json out = ordered_json::array();
  for (const auto &p : f.breakpoints()) {
    ordered_json bp = ordered_json::array();
    bp.push_back(p.t);
    if (std::isinf(p.v))
      bp.push_back("inf");
    else
      bp.push_back(p.v);
    out.push_back(bp);
  }
  return out;
}

} // namespace

AtomCatalog::AtomCatalog(int dim) : dim_(dim) {
  if (dim <= 0)
    throw DomainError("catalog dimension must be positive");
}

void AtomCatalog::add(const std::string &name, AtomRef ref) {
  if (!valid_identifier(name))
    throw DomainError("atom name '" + name +
                      "' is not a valid identifier (U, F and TOP are "
                      "reserved)");
  if (index_.count(name))
    throw DomainError("duplicate atom name '" + name + "'");
  if (ref.dim() != dim_)
    throw DomainError("atom '" + name + "' has dimension " +
                      std::to_string(ref.dim()) + ", catalog expects " +
                      std::to_string(dim_));
  index_[name] = entries_.size();
  entries_.emplace_back(name, std::move(ref));
}

bool AtomCatalog::contains(const std::string &name) const {
  return index_.count(name) != 0;
}

const AtomRef &AtomCatalog::at(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw DomainError("unknown atom '" + name + "'");
  return entries_[it->second].second;
}

AtomCatalog parse_atoms(const std::string &json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("atoms JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("dim") || !root.contains("atoms"))
    throw ParseError("atoms JSON must be {\"dim\": n, \"atoms\": [...]}");
  if (!root["dim"].is_number_integer() || root["dim"].get<int>() <= 0)
    throw ParseError("atoms JSON: dim must be a positive integer");
  int dim = root["dim"].get<int>();
  AtomCatalog catalog(dim);

  for (const auto &entry : root["atoms"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string())
      throw ParseError("atom entry needs a string name");
    std::string name = entry["name"].get<std::string>();
    std::string ctx = "atom '" + name + "'";
    if (!entry.contains("horizon") || !entry["horizon"].is_number())
      throw ParseError(ctx + ": missing numeric horizon");
    double horizon = entry["horizon"].get<double>();
    if (horizon < 0 || std::isnan(horizon) || std::isinf(horizon))
      throw ParseError(ctx + ": horizon must be finite and non-negative");

    try {
      if (entry.value("top", false)) {
        catalog.add(name, AtomRef(TopAtom{horizon, dim}));
        continue;
      }

      if (!entry.contains("mean") || !entry["mean"].is_array() ||
          entry["mean"].size() != static_cast<size_t>(dim))
        throw ParseError(ctx + ": mean must list exactly dim components");
      std::vector<PiecewiseLinear> mean;
      for (const auto &m : entry["mean"])
        mean.push_back(parse_plf(m, ctx + " mean"));

      if (!entry.contains("cov") || !entry["cov"].is_object())
        throw ParseError(ctx + ": missing cov object");
      const auto &cov = entry["cov"];
      std::string kind = cov.value("kind", "");
      Covariance parsed;
      if (kind == "diagonal") {
        if (!cov.contains("entries") ||
            cov["entries"].size() != static_cast<size_t>(dim))
          throw ParseError(ctx + ": diagonal cov needs dim entries");
        DiagonalCovariance d;
        for (const auto &v : cov["entries"])
          d.variances.push_back(parse_plf(v, ctx + " variance"));
        parsed = std::move(d);
      } else if (kind == "full") {
        if (!cov.contains("entries") ||
            cov["entries"].size() != static_cast<size_t>(dim))
          throw ParseError(ctx + ": full cov needs dim rows");
        FullCovariance f;
        f.dim = dim;
        for (const auto &row : cov["entries"]) {
          if (!row.is_array() || row.size() != static_cast<size_t>(dim))
            throw ParseError(ctx + ": full cov rows need dim entries");
          for (const auto &e : row)
            f.entries.push_back(parse_plf(e, ctx + " covariance"));
        }
        parsed = std::move(f);
      } else {
        throw ParseError(ctx + ": cov kind must be diagonal or full");
      }

      auto atom =
          std::make_shared<Atom>(name, std::move(mean), std::move(parsed));
      if (std::abs(atom->horizon() - horizon) > PiecewiseLinear::kTimeTol)
        throw ParseError(ctx + ": declared horizon " +
                         format_shortest(horizon) +
                         " differs from the component domains");
      catalog.add(name, AtomRef(std::move(atom)));
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(ctx + ": " + e.what());
    }
  }
  return catalog;
}

std::string emit_atoms(const AtomCatalog &catalog) {
  ordered_json root;
  root["dim"] = catalog.dim();
  root["atoms"] = ordered_json::array();
  for (const auto &[name, ref] : catalog.entries()) {
    ordered_json e;
    e["name"] = name;
    e["horizon"] = ref.horizon();
    if (ref.is_top()) {
      e["top"] = true;
      root["atoms"].push_back(e);
      continue;
    }
    const Atom &a = *ref.atom();
    e["mean"] = ordered_json::array();
    for (const auto &m : a.mean())
      e["mean"].push_back(emit_plf(m));
    ordered_json cov;
    if (const auto *d =
            std::get_if<DiagonalCovariance>(&a.covariance())) {
      cov["kind"] = "diagonal";
      cov["entries"] = ordered_json::array();
      for (const auto &v : d->variances)
        cov["entries"].push_back(emit_plf(v));
    } else {
      const auto &f = std::get<FullCovariance>(a.covariance());
      cov["kind"] = "full";
      cov["entries"] = ordered_json::array();
      for (int i = 0; i < f.dim; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < f.dim; ++j)
          row.push_back(emit_plf(f.at(i, j)));
        cov["entries"].push_back(row);
      }
    }
    e["cov"] = cov;
    root["atoms"].push_back(e);
  }
  return root.dump(2) + "\n";
}

} // namespace fpl
