#pragma once

namespace laxcheck {

/// Grading of a homogeneous local form: ghost number, horizontal (source)
/// form degree and vertical (field-variation) form degree.
struct Degree {
  int gh = 0;
  int fdM = 0;
  int fdF = 0;

  int total() const { return gh + fdM + fdF; }
  int parity() const { return ((total() % 2) + 2) % 2; }
  /// Lax degree: gh minus the co-form degree dimM - fdM.
  int lax(int dimM) const { return gh - (dimM - fdM); }

  Degree operator+(const Degree& o) const { return {gh + o.gh, fdM + o.fdM, fdF + o.fdF}; }
  Degree operator*(int k) const { return {gh * k, fdM * k, fdF * k}; }
  bool operator==(const Degree& o) const { return gh == o.gh && fdM == o.fdM && fdF == o.fdF; }
  bool operator!=(const Degree& o) const { return !(*this == o); }
};

} // namespace laxcheck
