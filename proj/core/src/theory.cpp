#include "laxcheck/theory.hpp"

namespace laxcheck {

std::vector<AtomId> CoordTheory::generators() const {
  std::vector<AtomId> out;
  for (FieldId f = 0; f < ctx->fields().size(); ++f)
    for (int c = 0; c < ctx->field(f).ncomp; ++c) out.push_back(ctx->jet(f, 0, c));
  return out;
}

} // namespace laxcheck
