#include "resilib/kripke.hpp"

#include <algorithm>
#include <stdexcept>

namespace resilib::kripke {

KripkeModel::KripkeModel(int worlds, int agents, int atoms, int horizon)
    : worlds_(worlds), agents_(agents), atoms_(atoms), horizon_(horizon) {
  if (worlds <= 0 || agents <= 0 || atoms < 0 || horizon <= 0) {
    throw std::invalid_argument("KripkeModel: sizes must be positive");
  }
  valuation_.assign(static_cast<std::size_t>(worlds),
                    std::vector<bool>(static_cast<std::size_t>(atoms), false));
  access_.assign(static_cast<std::size_t>(agents) * static_cast<std::size_t>(horizon),
                 std::vector<std::vector<int>>(static_cast<std::size_t>(worlds)));
}

void KripkeModel::set_atom(int world, int atom, bool holds) {
  if (world < 0 || world >= worlds_) throw std::out_of_range("KripkeModel: unknown world");
  if (atom < 0 || atom >= atoms_) throw std::out_of_range("KripkeModel: unknown atom");
  valuation_[static_cast<std::size_t>(world)][static_cast<std::size_t>(atom)] = holds;
}

bool KripkeModel::atom_holds(int world, int atom) const {
  if (world < 0 || world >= worlds_) throw std::out_of_range("KripkeModel: unknown world");
  if (atom < 0 || atom >= atoms_) throw std::out_of_range("KripkeModel: unknown atom");
  return valuation_[static_cast<std::size_t>(world)][static_cast<std::size_t>(atom)];
}

void KripkeModel::add_access(int agent, int time, int from, int to) {
  if (agent < 0 || agent >= agents_) throw std::out_of_range("KripkeModel: unknown agent");
  if (time < 0 || time >= horizon_) throw std::out_of_range("KripkeModel: time out of range");
  if (from < 0 || from >= worlds_ || to < 0 || to >= worlds_) {
    throw std::out_of_range("KripkeModel: unknown world in relation");
  }
  auto& row = access_[static_cast<std::size_t>(agent) * static_cast<std::size_t>(horizon_) +
                      static_cast<std::size_t>(time)][static_cast<std::size_t>(from)];
  const auto it = std::lower_bound(row.begin(), row.end(), to);
  if (it == row.end() || *it != to) row.insert(it, to);
}

const std::vector<int>& KripkeModel::accessible(int agent, int time, int from) const {
  if (agent < 0 || agent >= agents_) throw std::out_of_range("KripkeModel: unknown agent");
  if (time < 0 || time >= horizon_) throw std::out_of_range("KripkeModel: time out of range");
  if (from < 0 || from >= worlds_) throw std::out_of_range("KripkeModel: unknown world");
  return access_[static_cast<std::size_t>(agent) * static_cast<std::size_t>(horizon_) +
                 static_cast<std::size_t>(time)][static_cast<std::size_t>(from)];
}

namespace {

std::shared_ptr<const EpistemicFormula::Node> make_node(EpistemicFormula::Node node) {
  return std::make_shared<const EpistemicFormula::Node>(std::move(node));
}

bool sat(const KripkeModel& m, int w, int t, const EpistemicFormula::Node& f);

// Universal check over every agent's accessible worlds at one time step.
bool holds_at_accessible(const KripkeModel& m, int w, int t, const EpistemicFormula::Node& f) {
  for (int n = 0; n < m.agent_count(); ++n) {
    for (int w2 : m.accessible(n, t, w)) {
      if (!sat(m, w2, t, f)) return false;
    }
  }
  return true;
}

bool sat(const KripkeModel& m, int w, int t, const EpistemicFormula::Node& f) {
  switch (f.kind) {
    case EpistemicFormula::Kind::Top:
      return true;
    case EpistemicFormula::Kind::Atom:
      return m.atom_holds(w, f.atom);
    case EpistemicFormula::Kind::Not:
      return !sat(m, w, t, *f.left);
    case EpistemicFormula::Kind::Or:
      return sat(m, w, t, *f.left) || sat(m, w, t, *f.right);
    case EpistemicFormula::Kind::Know: {
      for (int w2 : m.accessible(f.agent, t, w)) {
        if (!sat(m, w2, t, *f.left)) return false;
      }
      return true;
    }
    case EpistemicFormula::Kind::Always: {
      for (int t2 = t; t2 < m.horizon(); ++t2) {
        if (!holds_at_accessible(m, w, t2, *f.left)) return false;
      }
      return true;
    }
    case EpistemicFormula::Kind::Until: {
      for (int t2 = t; t2 < m.horizon(); ++t2) {
        if (holds_at_accessible(m, w, t2, *f.right)) {
          bool held = true;
          for (int s = t; s < t2 && held; ++s) {
            held = holds_at_accessible(m, w, s, *f.left);
          }
          if (held) return true;
        }
      }
      return false;
    }
    case EpistemicFormula::Kind::MutualKnow: {
      for (int n : f.agents) {
        for (int w2 : m.accessible(n, t, w)) {
          if (!sat(m, w2, t, *f.left)) return false;
        }
      }
      return true;
    }
  }
  throw std::logic_error("kripke: unreachable");
}

}  // namespace

EpistemicFormula top() { EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Top;
  return EpistemicFormula(make_node(std::move(n))); }

EpistemicFormula atom(int p) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Atom;
  n.atom = p;
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula negation(EpistemicFormula f) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Not;
  n.left = f.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula disjunction(EpistemicFormula a, EpistemicFormula b) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Or;
  n.left = a.ptr();
  n.right = b.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula conjunction(EpistemicFormula a, EpistemicFormula b) {
  return negation(disjunction(negation(std::move(a)), negation(std::move(b))));
}

EpistemicFormula knows(int agent, EpistemicFormula f) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Know;
  n.agent = agent;
  n.left = f.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula henceforth(EpistemicFormula f) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Always;
  n.left = f.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula until(EpistemicFormula left, EpistemicFormula right) {
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::Until;
  n.left = left.ptr();
  n.right = right.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

EpistemicFormula mutual(std::vector<int> agents, EpistemicFormula f) {
  if (agents.empty()) throw std::invalid_argument("mutual: empty agent subset");
  EpistemicFormula::Node n;
  n.kind = EpistemicFormula::Kind::MutualKnow;
  n.agents = std::move(agents);
  n.left = f.ptr();
  return EpistemicFormula(make_node(std::move(n)));
}

namespace {

void validate(const KripkeModel& m, const EpistemicFormula::Node& f) {
  switch (f.kind) {
    case EpistemicFormula::Kind::Top:
      return;
    case EpistemicFormula::Kind::Atom:
      if (f.atom < 0 || f.atom >= m.atom_count()) {
        throw std::out_of_range("satisfies: unknown atom in formula");
      }
      return;
    case EpistemicFormula::Kind::Know:
      if (f.agent < 0 || f.agent >= m.agent_count()) {
        throw std::out_of_range("satisfies: unknown agent in formula");
      }
      validate(m, *f.left);
      return;
    case EpistemicFormula::Kind::MutualKnow:
      for (int n : f.agents) {
        if (n < 0 || n >= m.agent_count()) {
          throw std::out_of_range("satisfies: unknown agent in mutual-knowledge subset");
        }
      }
      validate(m, *f.left);
      return;
    default:
      if (f.left) validate(m, *f.left);
      if (f.right) validate(m, *f.right);
  }
}

}  // namespace

bool satisfies(const KripkeModel& model, int world, int time, const EpistemicFormula& formula) {
  if (world < 0 || world >= model.world_count()) {
    throw std::out_of_range("satisfies: world not in model");
  }
  if (time < 0 || time >= model.horizon()) throw std::out_of_range("satisfies: time out of range");
  validate(model, formula.node());
  return sat(model, world, time, formula.node());
}

bool mutual_knowledge(const KripkeModel& model, int world, int time,
                      const std::vector<int>& agents, const EpistemicFormula& formula) {
  return satisfies(model, world, time, mutual(agents, formula));
}

}  // namespace resilib::kripke
