#include "exactcache/ai.hpp"

namespace exactcache {

namespace {

std::uint8_t age(unsigned v) { return static_cast<std::uint8_t>(v); }

std::uint8_t bump(unsigned v, unsigned k) { return age(v < k ? v + 1 : k); }

AgeBoundMap pointwise(const AgeBoundMap& a, const AgeBoundMap& b, bool take_max) {
  if (a.size() != b.size()) throw std::invalid_argument("joining states over different universes");
  AgeBoundMap out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = take_max ? std::max(a[i], b[i]) : std::min(a[i], b[i]);
  return out;
}

AgeBoundMap filled(std::size_t n, unsigned value) { return AgeBoundMap(n, age(value)); }

}  // namespace

MustState update_must(const MustState& s, std::size_t slot, unsigned k) {
  MustState r = s;
  const unsigned accessed = s.bounds[slot];
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    if (i == slot)
      r.bounds[i] = 0;
    else if (s.bounds[i] < accessed)
      r.bounds[i] = bump(s.bounds[i], k);
  }
  return r;
}

MayState update_may(const MayState& s, std::size_t slot, unsigned k) {
  MayState r = s;
  const unsigned accessed = s.bounds[slot];
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    if (i == slot)
      r.bounds[i] = 0;
    else if (s.bounds[i] <= accessed && s.bounds[i] < k)
      r.bounds[i] = age(s.bounds[i] + 1u);
  }
  return r;
}

EhState update_eh(const EhState& s, std::size_t slot, unsigned k) {
  EhState r{s.min_age_ub, update_must(s.must, slot, k)};
  const unsigned must_of_accessed = s.must.bounds[slot];
  for (std::size_t i = 0; i < s.min_age_ub.size(); ++i) {
    const unsigned bound = s.min_age_ub[i];
    if (i == slot)
      r.min_age_ub[i] = 0;
    else if (must_of_accessed <= bound)
      r.min_age_ub[i] = age(bound);
    else
      r.min_age_ub[i] = bump(bound, k);
  }
  return r;
}

EmState update_em(const EmState& s, std::size_t slot, unsigned k) {
  EmState r{s.max_age_lb, update_may(s.may, slot, k)};
  const unsigned may_of_accessed = s.may.bounds[slot];
  for (std::size_t i = 0; i < s.max_age_lb.size(); ++i) {
    const unsigned bound = s.max_age_lb[i];
    if (i == slot)
      r.max_age_lb[i] = 0;
    else if (may_of_accessed < bound)
      r.max_age_lb[i] = age(bound);
    else
      r.max_age_lb[i] = bump(bound, k);
  }
  return r;
}

MustState join_must(const MustState& a, const MustState& b) { return {pointwise(a.bounds, b.bounds, true)}; }

MayState join_may(const MayState& a, const MayState& b) { return {pointwise(a.bounds, b.bounds, false)}; }

EhState join_eh(const EhState& a, const EhState& b) {
  return {pointwise(a.min_age_ub, b.min_age_ub, false), join_must(a.must, b.must)};
}

EmState join_em(const EmState& a, const EmState& b) {
  return {pointwise(a.max_age_lb, b.max_age_lb, true), join_may(a.may, b.may)};
}

bool in_gamma_must(const ConcreteCacheState& q, const MustState& s) {
  for (std::size_t i = 0; i < q.ages.size(); ++i)
    if (q.ages[i] > s.bounds[i]) return false;
  return true;
}

bool in_gamma_may(const ConcreteCacheState& q, const MayState& s) {
  for (std::size_t i = 0; i < q.ages.size(); ++i)
    if (q.ages[i] < s.bounds[i]) return false;
  return true;
}

bool in_gamma_eh(const StateSet& set, const EhState& s) {
  if (set.empty()) return false;
  for (const auto& q : set)
    if (!in_gamma_must(q, s.must)) return false;
  for (std::size_t i = 0; i < s.min_age_ub.size(); ++i) {
    unsigned smallest = 255;
    for (const auto& q : set) smallest = std::min<unsigned>(smallest, q.ages[i]);
    if (smallest > s.min_age_ub[i]) return false;
  }
  return true;
}

bool in_gamma_em(const StateSet& set, const EmState& s) {
  if (set.empty()) return false;
  for (const auto& q : set)
    if (!in_gamma_may(q, s.may)) return false;
  for (std::size_t i = 0; i < s.max_age_lb.size(); ++i) {
    unsigned largest = 0;
    for (const auto& q : set) largest = std::max<unsigned>(largest, q.ages[i]);
    if (largest < s.max_age_lb[i]) return false;
  }
  return true;
}

MustState initial_must(InitMode, std::size_t n, unsigned k) { return {filled(n, k)}; }

MayState initial_may(InitMode mode, std::size_t n, unsigned k) {
  return {filled(n, mode == InitMode::Empty ? k : 0)};
}

EhState initial_eh(InitMode mode, std::size_t n, unsigned k) {
  return {filled(n, k), initial_must(mode, n, k)};
}

EmState initial_em(InitMode mode, std::size_t n, unsigned k) {
  return {filled(n, mode == InitMode::Empty ? k : 0), initial_may(mode, n, k)};
}

AiFixpoints run_ai(const ProjectedCfg& g, const BlockUniverse& universe, InitMode mode, unsigned k,
                   bool with_definitely_unknown) {
  const std::size_t n = universe.size();
  AiFixpoints fp{fixpoint<MustDomain>(g, universe, initial_must(mode, n, k), k),
                 fixpoint<MayDomain>(g, universe, initial_may(mode, n, k), k), std::nullopt,
                 std::nullopt};
  if (with_definitely_unknown) {
    fp.eh = fixpoint<EhDomain>(g, universe, initial_eh(mode, n, k), k);
    fp.em = fixpoint<EmDomain>(g, universe, initial_em(mode, n, k), k);
  }
  return fp;
}

AiClassification ai_classify(const AiFixpoints& fp, const BlockUniverse& universe,
                             const AccessId& access, unsigned k) {
  const auto slot = universe.slot_of(access.block);
  if (!slot) throw std::invalid_argument("access block outside the analysis universe");
  const auto& must = fp.must.at.at(access.source);
  // Nothing reaches an unreachable source, so every access there vacuously hits.
  if (!must || must->bounds[*slot] < k) return {Verdict::AlwaysHit, false, false};
  const auto& may = fp.may.at.at(access.source);
  if (may->bounds[*slot] == k) return {Verdict::AlwaysMiss, false, false};
  AiClassification out;
  if (fp.eh && fp.em) {
    out.exists_hit = (*fp.eh->at[access.source]).min_age_ub[*slot] < k;
    out.exists_miss = (*fp.em->at[access.source]).max_age_lb[*slot] == k;
  }
  out.verdict = out.exists_hit && out.exists_miss ? Verdict::DefinitelyUnknown : Verdict::Unknown;
  return out;
}

}  // namespace exactcache
