"""Jet-theoretic log canonical threshold estimation.

The threshold of a pair is the infimum over m of codim(Cont^m)/m, and the
estimator computes those codimensions from finite-field counts at level
N = m (the contact order is determined by coefficients up to t^m, so any
higher level just multiplies counts by exact powers of q).

For each m the Cont^m count is stratified: by default jets are bucketed by
the vector of clamped coordinate orders, and for determinantal ideals the
caller can bucket by minor-order partial sums (the lambda stratification).
Buckets are exact cells for the instance families treated here, which is
what lets the cyclotomic fit certify codimensions instead of rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .consensus import (
    STATUS_AMBIGUOUS,
    STATUS_CONSENSUS,
    STATUS_EXACT_EMPTY,
    CountReport,
    extract_codim,
    extract_codim_bucketed,
)
from .counting import DEFAULT_BATCH_CAP, ord_vector_distribution
from .errors import ValidationError
from .jets import DEFAULT_BUDGET, IdealGens, jet_space_size
from .poly import MultiPoly

LCT_DEFAULT_PRIMES = (2, 3)


@dataclass(frozen=True)
class LctEstimate:
    per_m: tuple  # ((m, CountReport, Fraction-or-None), ...)
    estimate: Fraction | None  # None means +infinity (every contact locus empty)
    witness_m: int | None
    certified_upper_bound: bool
    ambient_dim: int
    generator_count: int
    estimate_lower_bound: Fraction | None = None
    internal_errors: tuple = ()

    def payload(self):
        out = {
            "per_m": [
                {
                    "m": m,
                    "report": rep.payload(),
                    "ratio": None if ratio is None else str(ratio),
                    "ratio_decimal": None if ratio is None else float(ratio),
                }
                for m, rep, ratio in self.per_m
            ],
            "estimate": None if self.estimate is None else str(self.estimate),
            "estimate_decimal": None if self.estimate is None else float(self.estimate),
            "witness_m": self.witness_m,
            "certified_upper_bound": self.certified_upper_bound,
            "ambient_dim": self.ambient_dim,
            "generator_count": self.generator_count,
        }
        if self.estimate_lower_bound is not None:
            out["estimate_lower_bound"] = str(self.estimate_lower_bound)
        if self.internal_errors:
            out["internal_errors"] = list(self.internal_errors)
        return out


def _coordinate_polys(gens: IdealGens):
    names = gens.variables
    return [MultiPoly.variable(gens.field, names, v) for v in names]


def contact_codim_stratified(
    gens: IdealGens,
    m: int,
    primes,
    budget=DEFAULT_BUDGET,
    batch_cap=DEFAULT_BATCH_CAP,
    stratifier="coords",
    strat_polys=None,
    strat_groups=None,
) -> CountReport:
    """Codimension of Cont^m(ideal) at level m, with exact stratified extraction.

    ``stratifier`` is "coords" (bucket by clamped coordinate orders),
    "polys" (bucket by the order vectors of ``strat_polys``, grouped into
    minima by ``strat_groups``), or None.
    """
    n = len(gens.variables)
    level = m
    work = list(gens.nonzero())
    if not work:
        raise ValidationError("zero ideal has no contact loci")

    if stratifier == "coords":
        bucket_polys = _coordinate_polys(gens)
        groups = [(i,) for i in range(len(bucket_polys))]
    elif stratifier == "polys":
        bucket_polys = list(strat_polys or [])
        groups = list(strat_groups or [(i,) for i in range(len(bucket_polys))])
    elif stratifier is None:
        bucket_polys = []
        groups = []
    else:
        raise ValidationError(f"unknown stratifier {stratifier!r}")

    k = len(bucket_polys)
    per_prime_tables = {}
    for q in primes:
        per_prime_tables[q] = ord_vector_distribution(
            bucket_polys + work, n, level, q, budget=budget, batch_cap=batch_cap, prefer="cheapest"
        )

    totals = []
    bucket_counts = {}
    for q in primes:
        total_hits = 0
        for key, cnt in per_prime_tables[q].items():
            strat_part, gen_part = key[:k], key[k:]
            if min(gen_part) != m:
                continue
            total_hits += cnt
            bucket_key = tuple(min(strat_part[i] for i in g) for g in groups) if groups else ()
            per = bucket_counts.setdefault(bucket_key, {})
            per[q] = per.get(q, 0) + cnt
        totals.append((q, total_hits, jet_space_size(n, level, q)))

    ambient = n * (level + 1)
    if all(t[1] == 0 for t in totals):
        return extract_codim(totals, ambient)
    # Buckets first: each bucket is a single exact cell for the instance
    # families here, and single-cell counts are basis elements of the fit,
    # which cannot collide across two primes.  Totals of unions can (and
    # do) collide with wrong basis elements, so the flat fit is only a
    # fallback.
    if bucket_counts:
        merged, _ = extract_codim_bucketed(bucket_counts, ambient, totals=totals)
        if merged.status in (STATUS_EXACT_EMPTY, STATUS_CONSENSUS):
            return merged
        flat = extract_codim(totals, ambient)
        if flat.status == STATUS_CONSENSUS:
            return flat
        return merged
    return extract_codim(totals, ambient)


def lct_estimate(
    gens: IdealGens,
    M: int,
    primes=LCT_DEFAULT_PRIMES,
    budget=DEFAULT_BUDGET,
    batch_cap=DEFAULT_BATCH_CAP,
    stratifier="coords",
    strat_polys=None,
    strat_groups=None,
) -> LctEstimate:
    """min over 1 <= m <= M of codim(Cont^m)/m, with certification flags.

    The estimate uses decided cells (exact fit or consensus); ambiguous
    cells lower the certification flag and feed only the reported lower
    bound.  Sanity guards: the estimate may exceed neither the number of
    generators (a subscheme cut by d equations has threshold at most d)
    nor the ambient dimension; violations are flagged as internal errors.
    """
    if M < 1:
        raise ValidationError("M must be at least 1")
    primes = tuple(primes)
    if len(set(primes)) < 2:
        raise ValidationError("threshold estimation needs at least two distinct primes")
    n = len(gens.variables)
    per_m = []
    estimate = None
    witness = None
    lower = None
    certified = True
    errors = []
    for m in range(1, M + 1):
        rep = contact_codim_stratified(
            gens, m, primes, budget=budget, batch_cap=batch_cap,
            stratifier=stratifier, strat_polys=strat_polys, strat_groups=strat_groups,
        )
        ratio = None
        if rep.status == STATUS_EXACT_EMPTY:
            pass
        elif rep.consensus_codim is not None:
            ratio = Fraction(rep.consensus_codim, m)
            if estimate is None or ratio <= estimate:
                estimate = ratio
                witness = m  # ties move the witness to the deepest level
            lower = ratio if lower is None else min(lower, ratio)
        else:
            certified = False
            if rep.codim_interval is not None:
                lo = Fraction(rep.codim_interval[0], m)
                lower = lo if lower is None else min(lower, lo)
        if rep.status == STATUS_AMBIGUOUS:
            certified = False
        per_m.append((m, rep, ratio))

    if estimate is not None:
        if estimate > len(list(gens.nonzero())):
            errors.append(
                f"estimate {estimate} exceeds the generator count "
                f"{len(list(gens.nonzero()))}; a d-equation subscheme has threshold <= d"
            )
        if estimate > n:
            errors.append(f"estimate {estimate} exceeds the ambient dimension {n}")

    return LctEstimate(
        per_m=tuple(per_m),
        estimate=estimate,
        witness_m=witness,
        certified_upper_bound=certified and estimate is not None,
        ambient_dim=n,
        generator_count=len(list(gens.nonzero())),
        estimate_lower_bound=lower,
        internal_errors=tuple(errors),
    )
