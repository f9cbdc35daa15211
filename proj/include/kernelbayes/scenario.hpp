#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kernelbayes/bayes.hpp"
#include "kernelbayes/error.hpp"
#include "kernelbayes/giry.hpp"
#include "kernelbayes/kernel.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/space.hpp"
#include "kernelbayes/transport.hpp"

namespace kb {

using Json = nlohmann::ordered_json;

struct NamedSpace {
  std::string name;
  MeasurableSpace space;
};

struct NamedMeasure {
  std::string name;
  std::string space;
  Probability measure;
};

struct NamedKernel {
  std::string name;
  std::string from;
  std::string to;
  StochasticKernel kernel;
};

struct ModelSpec {
  std::string prior;
  std::string sampling;
};

struct TransportSpec {
  std::string supply;
  std::string demand;
  std::vector<Rational> cost;  // row-major
};

struct LawsSpec {
  std::string space;
  DecisionRule rule;
  std::size_t resolution = 10;
  std::vector<SecondOrderMeasure> samples;
};

/// Everything a scenario file declares, with all references resolved and
/// every object validated at load time.
struct Scenario {
  std::vector<NamedSpace> spaces;
  std::vector<NamedMeasure> measures;
  std::vector<NamedKernel> kernels;
  std::optional<ModelSpec> model;
  std::vector<std::string> measurements;
  std::optional<TransportSpec> transport;
  std::optional<LawsSpec> laws;
  std::optional<std::uint64_t> seed;

  const NamedSpace& space(std::string_view name) const { return find(spaces, name, "space"); }
  const NamedMeasure& measure(std::string_view name) const { return find(measures, name, "measure"); }
  const NamedKernel& kernel(std::string_view name) const { return find(kernels, name, "kernel"); }

  BayesModel bayes_model() const {
    if (!model) throw Error(Errc::ValidationError, "scenario has no model");
    return BayesModel(measure(model->prior).measure, kernel(model->sampling).kernel);
  }

  std::vector<Probability> measurement_values() const {
    std::vector<Probability> out;
    for (const auto& m : measurements) out.push_back(measure(m).measure);
    return out;
  }

  TransportProblem transport_problem() const {
    if (!transport) throw Error(Errc::ValidationError, "scenario has no transport problem");
    return {measure(transport->supply).measure, measure(transport->demand).measure, transport->cost};
  }

 private:
  template <typename T>
  static const T& find(const std::vector<T>& items, std::string_view name, std::string_view kind) {
    for (const auto& item : items)
      if (item.name == name) return item;
    throw Error(Errc::ValidationError, std::string(kind) + " '" + std::string(name) + "' is not defined");
  }
};

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(Errc::ParseError, where + ": missing field '" + key + "'");
  return obj.at(key);
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw Error(Errc::ParseError, where + ": expected a string");
  return j.get<std::string>();
}

inline Rational as_rational(const Json& j, const std::string& where) {
  if (!j.is_string()) throw Error(Errc::ParseError, where + ": rationals must be \"num/den\" strings");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ParseError, where + ": " + e.message());
  }
}

inline std::vector<std::string> as_strings(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(Errc::ParseError, where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, where));
  return out;
}

/// Re-throws any library error with the offending entity prefixed; parse
/// errors stay parse errors, everything else becomes a validation error.
template <typename F>
auto with_context(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const Errc code = e.code() == Errc::ParseError ? Errc::ParseError : Errc::ValidationError;
    const std::string& msg = e.message();
    if (msg.find(where) != std::string::npos) throw Error(code, msg);
    throw Error(code, where + ": " + msg);
  }
}

inline MeasurableSpace parse_space(const Json& j, const std::string& where) {
  if (j.is_object() && j.contains("builtin")) {
    const auto kind = as_string(j.at("builtin"), where);
    if (kind == "two_point") return two_point();
    if (kind == "terminal") return terminal();
    throw Error(Errc::ParseError, where + ": unknown builtin '" + kind + "'");
  }
  auto labels = as_strings(member(j, "points", where), where);
  if (!j.contains("atoms")) return MeasurableSpace::discrete(std::move(labels));
  const auto& atoms = j.at("atoms");
  if (!atoms.is_array()) throw Error(Errc::ParseError, where + ": 'atoms' must be an array of blocks");
  std::vector<std::vector<std::string>> blocks;
  for (const auto& b : atoms) blocks.push_back(as_strings(b, where));
  return MeasurableSpace::make(std::move(labels), blocks);
}

inline Json space_to_json(const MeasurableSpace& s) {
  Json atoms = Json::array();
  for (const auto& block : s.atoms()) {
    Json b = Json::array();
    for (std::size_t p : block) b.push_back(s.label(p));
    atoms.push_back(std::move(b));
  }
  return Json{{"points", s.labels()}, {"atoms", std::move(atoms)}};
}

/// Atom-labelled weights; atoms left out get weight zero.
inline Probability parse_weights(const MeasurableSpace& space, const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::ParseError, where + ": weights must be an object of atom-label: \"n/d\"");
  std::vector<Rational> w(space.atom_count(), Rational(0));
  for (const auto& [key, value] : j.items()) {
    auto a = space.find_atom(key);
    if (!a) throw Error(Errc::ValidationError, where + ": '" + key + "' is not an atom");
    w[*a] = as_rational(value, where);
  }
  return Probability(space, std::move(w));
}

inline Json weights_to_json(const Probability& p) {
  Json out = Json::object();
  for (std::size_t a = 0; a < p.space().atom_count(); ++a) out[p.space().atom_label(a)] = format_rational(p.weight(a));
  return out;
}

inline std::vector<std::vector<Rational>> parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(Errc::ParseError, where + ": expected a matrix (array of rows)");
  std::vector<std::vector<Rational>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw Error(Errc::ParseError, where + ": each row must be an array");
    std::vector<Rational> r;
    for (const auto& v : row) r.push_back(as_rational(v, where));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json matrix_to_json(const std::vector<Rational>& flat, std::size_t cols) {
  Json rows = Json::array();
  for (std::size_t r = 0; r * cols < flat.size(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(format_rational(flat[r * cols + c]));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Predicate parse_predicate(const MeasurableSpace& space, const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::ParseError, where + ": predicate must be an object");
  auto list = [&](const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw Error(Errc::ParseError, where + ": '" + key + "' must be an array");
    std::vector<Predicate> parts;
    for (const auto& p : arr) parts.push_back(parse_predicate(space, p, where));
    return parts;
  };
  if (j.contains("all")) return Predicate::all_of(list("all"));
  if (j.contains("any")) return Predicate::any_of(list("any"));
  if (j.contains("not")) return Predicate::negate(parse_predicate(space, j.at("not"), where));
  auto set = MeasurableSet::of_points(space, as_strings(member(j, "set", where), where));
  auto cmp = parse_comparator(as_string(member(j, "cmp", where), where));
  return Predicate::threshold(std::move(set), cmp, as_rational(member(j, "value", where), where));
}

inline Json predicate_to_json(const Predicate& p) {
  switch (p.kind()) {
    case Predicate::Kind::Threshold: {
      Json set = Json::array();
      const auto& sp = p.set().space();
      for (std::size_t a : p.set().atom_indices())
        for (std::size_t pt : sp.atom(a)) set.push_back(sp.label(pt));
      return Json{{"set", std::move(set)}, {"cmp", std::string(to_string(p.comparator()))}, {"value", format_rational(p.value())}};
    }
    case Predicate::Kind::Not: return Json{{"not", predicate_to_json(p.children().front())}};
    case Predicate::Kind::All:
    case Predicate::Kind::Any: {
      Json parts = Json::array();
      for (const auto& c : p.children()) parts.push_back(predicate_to_json(c));
      return Json{{p.kind() == Predicate::Kind::All ? "all" : "any", std::move(parts)}};
    }
  }
  return Json();
}

inline SecondOrderMeasure parse_sample(const MeasurableSpace& space, const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(Errc::ParseError, where + ": a sample is a nonempty array of components");
  std::vector<std::pair<Probability, Rational>> entries;
  for (const auto& c : j)
    entries.emplace_back(parse_weights(space, member(c, "measure", where), where), as_rational(member(c, "weight", where), where));
  return SecondOrderMeasure(std::move(entries));
}

inline Json sample_to_json(const SecondOrderMeasure& q) {
  Json out = Json::array();
  for (const auto& [p, w] : q.support()) out.push_back(Json{{"measure", weights_to_json(p)}, {"weight", format_rational(w)}});
  return out;
}

}  // namespace detail

/// Parses and validates a scenario document. Errors name the offending entity.
inline Scenario load_scenario(const Json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw Error(Errc::ParseError, "scenario must be a JSON object");
  Scenario sc;

  if (doc.contains("spaces")) {
    const auto& spaces = doc.at("spaces");
    if (!spaces.is_object()) throw Error(Errc::ParseError, "'spaces' must be an object");
    for (const auto& [name, body] : spaces.items()) {
      const std::string where = "space '" + name + "'";
      sc.spaces.push_back({name, with_context(where, [&] { return parse_space(body, where); })});
    }
  }

  if (doc.contains("measures")) {
    const auto& measures = doc.at("measures");
    if (!measures.is_object()) throw Error(Errc::ParseError, "'measures' must be an object");
    for (const auto& [name, body] : measures.items()) {
      const std::string where = "measure '" + name + "'";
      with_context(where, [&] {
        const auto space_name = as_string(member(body, "space", where), where);
        const auto& space = sc.space(space_name).space;
        sc.measures.push_back({name, space_name, parse_weights(space, member(body, "weights", where), where)});
      });
    }
  }

  if (doc.contains("kernels")) {
    const auto& kernels = doc.at("kernels");
    if (!kernels.is_object()) throw Error(Errc::ParseError, "'kernels' must be an object");
    for (const auto& [name, body] : kernels.items()) {
      const std::string where = "kernel '" + name + "'";
      with_context(where, [&] {
        const auto from = as_string(member(body, "from", where), where);
        const auto to = as_string(member(body, "to", where), where);
        auto k = StochasticKernel::from_rows(sc.space(from).space, sc.space(to).space,
                                             parse_matrix(member(body, "rows", where), where));
        sc.kernels.push_back({name, from, to, std::move(k)});
      });
    }
  }

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    with_context("model", [&] {
      ModelSpec spec{as_string(member(m, "prior", "model"), "model"), as_string(member(m, "sampling", "model"), "model")};
      sc.model = spec;
      (void)sc.bayes_model();
    });
  }

  if (doc.contains("measurements")) {
    const auto names = as_strings(doc.at("measurements"), "measurements");
    if (!sc.model) throw Error(Errc::ValidationError, "measurements: scenario has no model");
    const auto data = sc.bayes_model().data();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string where = "measurement " + std::to_string(i + 1) + " ('" + names[i] + "')";
      with_context(where, [&] {
        require_same_space(sc.measure(names[i]).measure.space(), data, "not a measure on the data space");
      });
    }
    sc.measurements = names;
  }

  if (doc.contains("transport")) {
    const auto& t = doc.at("transport");
    with_context("transport", [&] {
      TransportSpec spec;
      spec.supply = as_string(member(t, "supply", "transport"), "transport");
      spec.demand = as_string(member(t, "demand", "transport"), "transport");
      for (const auto& row : parse_matrix(member(t, "cost", "transport"), "transport"))
        spec.cost.insert(spec.cost.end(), row.begin(), row.end());
      sc.transport = spec;
      sc.transport_problem().validate();
    });
  }

  if (doc.contains("laws")) {
    const auto& l = doc.at("laws");
    with_context("laws", [&] {
      const auto space_name = as_string(member(l, "space", "laws"), "laws");
      const auto& space = sc.space(space_name).space;
      const auto& rule_json = member(l, "rule", "laws");
      std::vector<Clause> clauses;
      if (rule_json.contains("clauses")) {
        const auto& cl = rule_json.at("clauses");
        if (!cl.is_array()) throw Error(Errc::ParseError, "laws: 'clauses' must be an array");
        for (std::size_t i = 0; i < cl.size(); ++i) {
          const std::string where = "laws clause " + std::to_string(i + 1);
          clauses.push_back(with_context(where, [&] {
            return Clause{parse_predicate(space, member(cl[i], "if", where), where),
                          space.index_of(as_string(member(cl[i], "then", where), where))};
          }));
        }
      }
      const std::size_t fallback = space.index_of(as_string(member(rule_json, "default", "laws rule"), "laws rule"));
      std::size_t resolution = 10;
      if (l.contains("resolution")) {
        if (!l.at("resolution").is_number_unsigned() || l.at("resolution").get<std::size_t>() == 0)
          throw Error(Errc::ParseError, "laws: 'resolution' must be a positive integer");
        resolution = l.at("resolution").get<std::size_t>();
      }
      std::vector<SecondOrderMeasure> samples;
      if (l.contains("samples")) {
        const auto& arr = l.at("samples");
        if (!arr.is_array()) throw Error(Errc::ParseError, "laws: 'samples' must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const std::string where = "laws sample " + std::to_string(i + 1);
          samples.push_back(with_context(where, [&] { return parse_sample(space, arr[i], where); }));
        }
      }
      sc.laws = LawsSpec{space_name, DecisionRule(space, std::move(clauses), fallback), resolution, std::move(samples)};
    });
  }

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw Error(Errc::ParseError, "'seed' must be a nonnegative integer");
    sc.seed = doc.at("seed").get<std::uint64_t>();
  }
  return sc;
}

inline Scenario load_scenario_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return load_scenario(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

/// Canonical serialization; reloading it yields structurally equal objects.
inline Json to_json(const Scenario& sc) {
  using namespace detail;
  Json doc = Json::object();
  Json spaces = Json::object();
  for (const auto& s : sc.spaces) spaces[s.name] = space_to_json(s.space);
  doc["spaces"] = std::move(spaces);
  Json measures = Json::object();
  for (const auto& m : sc.measures) measures[m.name] = Json{{"space", m.space}, {"weights", weights_to_json(m.measure)}};
  doc["measures"] = std::move(measures);
  Json kernels = Json::object();
  for (const auto& k : sc.kernels)
    kernels[k.name] = Json{{"from", k.from}, {"to", k.to}, {"rows", matrix_to_json(k.kernel.entries(), k.kernel.cols())}};
  doc["kernels"] = std::move(kernels);
  if (sc.model) doc["model"] = Json{{"prior", sc.model->prior}, {"sampling", sc.model->sampling}};
  if (!sc.measurements.empty()) doc["measurements"] = sc.measurements;
  if (sc.transport) {
    const auto cols = sc.measure(sc.transport->demand).measure.space().atom_count();
    doc["transport"] = Json{{"supply", sc.transport->supply},
                            {"demand", sc.transport->demand},
                            {"cost", matrix_to_json(sc.transport->cost, cols)}};
  }
  if (sc.laws) {
    const auto& rule = sc.laws->rule;
    Json clauses = Json::array();
    for (const auto& c : rule.clauses())
      clauses.push_back(Json{{"if", predicate_to_json(c.when)}, {"then", rule.base_space().label(c.output)}});
    Json samples = Json::array();
    for (const auto& q : sc.laws->samples) samples.push_back(sample_to_json(q));
    doc["laws"] = Json{{"space", sc.laws->space},
                       {"rule", Json{{"clauses", std::move(clauses)}, {"default", rule.base_space().label(rule.default_output())}}},
                       {"resolution", sc.laws->resolution},
                       {"samples", std::move(samples)}};
  }
  if (sc.seed) doc["seed"] = *sc.seed;
  return doc;
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string digest(const Scenario& sc) {
  const std::string text = to_json(sc).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xF];
  return out;
}

}  // namespace kb
