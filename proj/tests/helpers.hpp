#pragma once

#include "pdpomdp/model_io.hpp"
#include "pdpomdp/normalize.hpp"

#include <string>

namespace testing {

inline std::string model_path(const std::string& name) {
  return std::string(PDPOMDP_MODELS_DIR) + "/" + name + ".pdp";
}

struct Corpus {
  pdpomdp::ModelFile file;
  pdpomdp::Normalization norm;
  pdpomdp::SubBelief init;

  const pdpomdp::Pomdp& model() const { return norm.model; }
  pdpomdp::StateId id(const std::string& name) const { return *norm.model.find_state(name); }
  pdpomdp::ActionId action(const std::string& name) const { return *norm.model.find_action(name); }
  pdpomdp::ObsId obs(const std::string& name) const { return *norm.model.find_observation(name); }
  pdpomdp::StateId top() const { return norm.model.normalized->top; }
  pdpomdp::StateId bot() const { return norm.model.normalized->bot; }

  pdpomdp::Support support(std::initializer_list<const char*> names) const {
    pdpomdp::Support s;
    for (const char* n : names) s = s.with(id(n));
    return s;
  }
};

inline Corpus from_file(pdpomdp::ModelFile f) {
  Corpus c{std::move(f), {}, {}};
  c.norm = pdpomdp::normalize(c.file.model, c.file.targets);
  c.init = c.norm.map_belief(c.file.init);
  return c;
}

inline Corpus load(const std::string& name) { return from_file(pdpomdp::load_model(model_path(name))); }

inline Corpus parse(const std::string& text) { return from_file(pdpomdp::parse_model(text)); }

inline pdpomdp::Rational q(const char* text) {
  pdpomdp::Rational r(text);
  r.canonicalize();
  return r;
}

}  // namespace testing
