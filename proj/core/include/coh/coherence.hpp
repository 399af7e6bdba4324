#pragma once

// Differential testing of coherence: enumerate several derivations of one
// judgment, translate each, and compare the translations in generated
// closing contexts under fueled evaluation.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coh/derivation.hpp"
#include "coh/eval.hpp"
#include "coh/result.hpp"
#include "coh/syntax.hpp"

namespace coh {

Flavor flavor_of(Calculus calc);
Type translate_type(Calculus calc, const Type& t);
Term translate_term(Calculus calc, const TypeDerivation& d);

/// Source-level replay followed by rule-by-rule validation.
Result<TypeDerivation> replay_derivation(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                         const Skeleton& sk);

struct EnumBudget {
  // Each mutation away from the starting derivation costs one or two.
  std::size_t extra_subsumptions = 2;
  std::size_t max_derivations = 6;
  // Mutation candidates examined before giving up.
  std::size_t work_limit = 400;
};

/// Distinct (by rule tree) valid derivations of env |- e : goal. Starts
/// from the seeds, or from the canonical derivation when none are given,
/// and explores small rewrites of them breadth first.
std::vector<TypeDerivation> enumerate_derivations(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                                  const EnumBudget& budget = {},
                                                  const std::vector<TypeDerivation>& seeds = {});

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t term_size = 10;
  std::size_t samples = 100;
  EnumBudget derivations;
  std::size_t contexts = 4;
  std::uint64_t fuel = 10000;
  Calculus calculus = Calculus::Stlc;
  // Allow shift0 and reset0 in generated terms.
  bool control = true;
  // Goal type of generated terms; random when absent.
  std::optional<Type> goal;
  std::size_t threads = 1;
};

struct Sample {
  Env env;
  Term term;
  Type goal;
  TypeDerivation derivation;
};

/// Well-typed closed programs, built derivation first.
std::vector<Sample> gen_terms(const GenConfig& config);

/// The name of the hole in a context.
inline const std::string kHole = "[]";

Term plug_hole(const Term& context, const Term& t);

/// Closing contexts from the hole type to the answer type. The first one
/// is the canonical eliminator: the hole applied to plain arguments and
/// continuations until a base type is reached.
std::vector<Term> gen_contexts(Flavor flavor, const Type& hole, const Type& answer, const GenConfig& config);

/// A closed value of type t.
Term gen_value(const Type& t, std::mt19937_64& rng, std::size_t depth);

enum class Approx { Holds, Fails, Unknown };

/// e1 approximates e2 at index k: if e1 converges within k beta steps then
/// e2 converges, judged with `fuel` beta steps.
Approx approx_at(std::uint64_t k, std::uint64_t fuel, const Term& e1, const Term& e2);

struct Observation {
  Outcome::Kind kind = Outcome::Kind::Converged;
  std::optional<std::uint64_t> constant;
  std::uint64_t beta = 0;
  std::uint64_t iota = 0;
  std::string value;
};

Observation observe(const Term& program, std::uint64_t fuel);

struct PairVerdict {
  enum class Kind { Agree, Disagree, Unknown } kind = Kind::Agree;
  // Agree because both runs ran out of fuel.
  bool low_confidence = false;
  std::size_t first = 0;
  std::size_t second = 0;
  // Index into contexts, or contexts.size() for the erased comparison.
  std::size_t context = 0;
  std::string note;
};

struct CoherenceReport {
  enum class Summary { Coherent, Incoherent, Inconclusive };

  Calculus calculus = Calculus::Stlc;
  Env env;
  Term term;
  Type goal;
  Type target_type;
  std::vector<Skeleton> derivations;
  std::vector<Term> translations;
  std::vector<Term> contexts;
  // Values substituted for the free variables of the term.
  std::vector<std::pair<std::string, Term>> closing;
  std::vector<PairVerdict> verdicts;
  bool erased_checked = false;
  Summary summary = Summary::Coherent;
  std::string reason;
  std::uint64_t seed = 0;
  std::uint64_t fuel = 0;

  const PairVerdict* witness() const;
};

struct CoherenceConfig {
  std::uint64_t seed = 1;
  EnumBudget derivations;
  std::size_t contexts = 4;
  std::uint64_t fuel = 10000;
  std::size_t threads = 1;
  // Used instead of enumeration when non-empty.
  std::vector<Skeleton> supplied;
  // Starting points for enumeration; the canonical derivation when empty.
  std::vector<TypeDerivation> seeds;
};

Result<CoherenceReport> coherence_check(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                        const CoherenceConfig& config);

std::string summary_name(CoherenceReport::Summary s);
std::string report_text(const CoherenceReport& r);
std::string report_json(const CoherenceReport& r);

}  // namespace coh
