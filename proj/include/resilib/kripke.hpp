#pragma once

#include <memory>
#include <vector>

namespace resilib::kripke {

/// Time-indexed multi-agent Kripke model M_t = (W, {R_{n,t}}, v).
/// Worlds, agents, atoms and time steps are dense integer ids.
class KripkeModel {
public:
  KripkeModel(int worlds, int agents, int atoms, int horizon);

  [[nodiscard]] int world_count() const { return worlds_; }
  [[nodiscard]] int agent_count() const { return agents_; }
  [[nodiscard]] int atom_count() const { return atoms_; }
  [[nodiscard]] int horizon() const { return horizon_; }

  void set_atom(int world, int atom, bool holds = true);
  [[nodiscard]] bool atom_holds(int world, int atom) const;

  void add_access(int agent, int time, int from, int to);
  [[nodiscard]] const std::vector<int>& accessible(int agent, int time, int from) const;

private:
  int worlds_;
  int agents_;
  int atoms_;
  int horizon_;
  std::vector<std::vector<bool>> valuation_;            // [world][atom]
  std::vector<std::vector<std::vector<int>>> access_;   // [agent*horizon+time][from] -> to*
};

/// Formula tree over
///   phi ::= T | p | !phi | phi v phi' | K_n phi | G phi | phi U phi' | E_N' phi.
class EpistemicFormula {
public:
  enum class Kind { Top, Atom, Not, Or, Know, Always, Until, MutualKnow };

  struct Node {
    Kind kind = Kind::Top;
    int atom = -1;
    int agent = -1;
    std::vector<int> agents;  // MutualKnow subset
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit EpistemicFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  [[nodiscard]] const Node& node() const { return *node_; }
  [[nodiscard]] const std::shared_ptr<const Node>& ptr() const { return node_; }

private:
  std::shared_ptr<const Node> node_;
};

EpistemicFormula top();
EpistemicFormula atom(int p);
EpistemicFormula negation(EpistemicFormula f);
EpistemicFormula disjunction(EpistemicFormula a, EpistemicFormula b);
EpistemicFormula conjunction(EpistemicFormula a, EpistemicFormula b);
EpistemicFormula knows(int agent, EpistemicFormula f);
/// G phi: phi at every accessible (t', w'), t' >= t. The temporal clauses
/// quantify over every agent's accessibility relation.
EpistemicFormula henceforth(EpistemicFormula f);
EpistemicFormula until(EpistemicFormula left, EpistemicFormula right);
EpistemicFormula mutual(std::vector<int> agents, EpistemicFormula f);

/// (M_t, w) |= phi, recursing over all clauses; G and U range over
/// t' in [t, horizon).
bool satisfies(const KripkeModel& model, int world, int time, const EpistemicFormula& formula);

/// E_{N'} phi as a conjunction of K_n phi over the subset; rejects an empty
/// subset.
bool mutual_knowledge(const KripkeModel& model, int world, int time,
                      const std::vector<int>& agents, const EpistemicFormula& formula);

}  // namespace resilib::kripke
