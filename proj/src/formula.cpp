#include "oraclemine/formula.hpp"

#include "oraclemine/errors.hpp"

namespace oraclemine {

Formula Formula::var(std::string name) {
  if (name.empty()) {
    throw InvalidArgument("empty variable name");
  }
  Formula f(Kind::Var);
  f.name_ = std::move(name);
  return f;
}

Formula Formula::negation(Formula f) {
  Formula n(Kind::Not);
  n.children_.push_back(std::move(f));
  return n;
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) {
    return truth();
  }
  if (children.size() == 1) {
    return std::move(children.front());
  }
  Formula f(Kind::And);
  f.children_ = std::move(children);
  return f;
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) {
    return falsity();
  }
  if (children.size() == 1) {
    return std::move(children.front());
  }
  Formula f(Kind::Or);
  f.children_ = std::move(children);
  return f;
}

Formula Formula::conjoin(Formula rhs) const {
  if (kind_ == Kind::True) {
    return rhs;
  }
  if (rhs.kind_ == Kind::True) {
    return *this;
  }
  if (kind_ == Kind::And) {
    Formula f = *this;
    f.children_.push_back(std::move(rhs));
    return f;
  }
  return conjunction({*this, std::move(rhs)});
}

bool Formula::evaluate(const std::function<bool(const std::string&)>& value) const {
  switch (kind_) {
  case Kind::True:
    return true;
  case Kind::False:
    return false;
  case Kind::Var:
    return value(name_);
  case Kind::Not:
    return !children_.front().evaluate(value);
  case Kind::And:
    for (const auto& c : children_) {
      if (!c.evaluate(value)) {
        return false;
      }
    }
    return true;
  case Kind::Or:
    for (const auto& c : children_) {
      if (c.evaluate(value)) {
        return true;
      }
    }
    return false;
  }
  return false;
}

std::set<std::string> Formula::variables() const {
  std::set<std::string> out;
  collect(out);
  return out;
}

void Formula::collect(std::set<std::string>& out) const {
  if (kind_ == Kind::Var) {
    out.insert(name_);
  }
  for (const auto& c : children_) {
    c.collect(out);
  }
}

std::string Formula::to_string() const {
  std::string out;
  render(out, false);
  return out;
}

void Formula::render(std::string& out, bool nested) const {
  switch (kind_) {
  case Kind::True:
    out += "⊤";
    return;
  case Kind::False:
    out += "⊥";
    return;
  case Kind::Var:
    out += name_;
    return;
  case Kind::Not:
    out += "¬";
    children_.front().render(out, true);
    return;
  case Kind::And:
  case Kind::Or: {
    const char* sep = kind_ == Kind::And ? " ∧ " : " ∨ ";
    if (nested) {
      out += '(';
    }
    for (std::size_t i = 0; i < children_.size(); ++i) {
      if (i > 0) {
        out += sep;
      }
      children_[i].render(out, true);
    }
    if (nested) {
      out += ')';
    }
    return;
  }
  }
}

} // namespace oraclemine
