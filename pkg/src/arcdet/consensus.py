"""Turning finite-field point counts into codimension estimates.

Two extractors live here.

``codim_consensus`` is the baseline: per prime, the dimension is read off
as round(log_q count) with a 0.45 guard band, and a consensus requires
every prime to agree inside its band.  Ambiguity is surfaced, never
rounded away.

``extract_codim`` adds an exact pre-pass.  The cells that appear in this
problem family (monomial strata, GL-orbit strata of matrix jets, chart
cells of incidence loci, projective fiber cells) have counts of the very
rigid shape

    q^a * (q-1)^b * (q+1)^e * (q^2+q+1)^f

whose exponents are pinned by exact integer factoring at each prime and
cross-checked across all primes; when that succeeds the dimension
a+b+e+2f is exact and no rounding is involved.  When it fails we fall
back to the guarded rounding above.  Log-rounding alone is provably
unreliable here: at q=2 the factor (q-1) is invisible, and exact-contact
cells come in families whose component count inflates the leading
coefficient, so the guard band is essential, not decorative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

GUARD_BAND = 0.45

STATUS_EXACT_EMPTY = "EXACT_EMPTY"
STATUS_CONSENSUS = "CONSENSUS"
STATUS_AMBIGUOUS = "AMBIGUOUS"
STATUS_SAMPLED = "SAMPLED"


@dataclass(frozen=True)
class CountReport:
    """Point counts per prime and the codimension they support."""

    counts: tuple  # ((q, raw, total), ...)
    ambient_dim: int
    status: str
    dims: dict = field(default_factory=dict)  # per-prime rounded dim votes
    consensus_codim: int | None = None
    codim_interval: tuple | None = None
    method: str = ""
    detail: str = ""
    sentinel_counts: tuple = ()  # jets vanishing to level, per prime, when tracked

    @property
    def is_empty(self):
        return self.status == STATUS_EXACT_EMPTY

    def codim_or_none(self):
        return self.consensus_codim

    def payload(self):
        out = {
            "counts": [[q, raw, total] for q, raw, total in self.counts],
            "ambient_dim": self.ambient_dim,
            "status": self.status,
            "method": self.method,
        }
        if self.dims:
            out["dims"] = {str(q): d for q, d in sorted(self.dims.items())}
        if self.consensus_codim is not None:
            out["codim"] = self.consensus_codim
        if self.codim_interval is not None:
            out["codim_interval"] = list(self.codim_interval)
        if self.detail:
            out["detail"] = self.detail
        return out


def _v_adic(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def cyclotomic_fit(counts):
    """Fit count(q) = q^a (q-1)^b (q+1)^e (q^2+q+1)^f across >= 2 primes.

    Returns (dim, description) or None.  The factors at distinct primes pin
    each exponent by exact divisibility, and every prime must reproduce the
    count exactly, so a successful fit is a certificate, not a guess.
    """
    counts = sorted(set((q, c) for q, c in counts))
    if len(counts) < 2 or any(c <= 0 for _, c in counts):
        return None
    if len({q for q, _ in counts}) < 2:
        return None
    a = None
    for q, c in counts:
        va, _ = _v_adic(c, q)
        if a is None:
            a = va
        elif va != a:
            return None
    rests = {q: c // q**a for q, c in counts}
    bound = max(r.bit_length() for r in rests.values()) + 1
    big = [q for q in rests if q > 2]  # (q-1) is invisible at q=2
    matches = []
    for b in range(bound + 1):
        if any((q - 1) ** b > rests[q] for q in big):
            break
        for e in range(bound + 1):
            be = {q: (q - 1) ** b * (q + 1) ** e for q in rests}
            if any(be[q] > rests[q] for q in rests):
                break
            for f in range(bound + 1):
                val = {q: be[q] * (q * q + q + 1) ** f for q in rests}
                if any(val[q] > rests[q] for q in rests):
                    break
                if all(val[q] == rests[q] for q in rests):
                    matches.append((b, e, f))
    dims = {a + b + e + 2 * f for b, e, f in matches}
    if len(dims) != 1:
        return None
    b, e, f = matches[0]
    return dims.pop(), f"q^{a}(q-1)^{b}(q+1)^{e}(q^2+q+1)^{f}"


def _round_log_dim(count, q):
    lg = math.log(count, q)
    d = math.floor(lg + 0.5)
    return d, abs(lg - d)


def codim_consensus(counts, n, level):
    """Spec-shape consensus: per-prime rounded dims with a 0.45 guard band.

    ``counts`` is a list of (q, raw_count, total).  Requires two distinct
    primes unless the count is zero or the full space.  Ambiguity is a
    status, not an error.
    """
    ambient = n * (level + 1)
    counts = tuple((q, raw, total) for q, raw, total in counts)
    if all(raw == 0 for _, raw, _ in counts):
        return CountReport(counts, ambient, STATUS_EXACT_EMPTY, method="empty")
    if all(raw == total for _, raw, total in counts):
        return CountReport(
            counts, ambient, STATUS_CONSENSUS, dims={q: ambient for q, _, _ in counts},
            consensus_codim=0, method="full",
        )
    if len({q for q, _, _ in counts}) < 2:
        raise ValueError("consensus needs at least two distinct primes unless empty or full")
    dims = {}
    in_band = True
    for q, raw, _ in counts:
        if raw == 0:
            continue  # empty at this prime, nonempty elsewhere: no vote
        d, dev = _round_log_dim(raw, q)
        dims[q] = d
        if dev >= GUARD_BAND:
            in_band = False
    votes = sorted(set(dims.values()))
    if len(votes) == 1 and in_band and len(dims) >= 2:
        d = votes[0]
        return CountReport(
            counts, ambient, STATUS_CONSENSUS, dims=dims,
            consensus_codim=ambient - d, method="rounding",
        )
    lo, hi = votes[0], votes[-1]
    return CountReport(
        counts, ambient, STATUS_AMBIGUOUS, dims=dims,
        codim_interval=(ambient - hi, ambient - lo), method="rounding",
        detail="per-prime dimension votes disagree or fall outside the guard band",
    )


def extract_codim(counts, ambient_dim, allow_fit=True):
    """Codimension of a counted locus inside an ambient_dim-dimensional space.

    Pipeline: exact-empty, full-space, exact cyclotomic fit, guarded
    rounding consensus.
    """
    counts = tuple((q, raw, total) for q, raw, total in counts)
    if all(raw == 0 for _, raw, _ in counts):
        return CountReport(counts, ambient_dim, STATUS_EXACT_EMPTY, method="empty")
    if all(raw == total for _, raw, total in counts):
        return CountReport(
            counts, ambient_dim, STATUS_CONSENSUS, dims={q: ambient_dim for q, _, _ in counts},
            consensus_codim=0, method="full",
        )
    if allow_fit:
        fit = cyclotomic_fit([(q, raw) for q, raw, _ in counts if raw > 0])
        if fit is not None and all(raw > 0 for _, raw, _ in counts):
            dim, shape = fit
            if dim <= ambient_dim:
                return CountReport(
                    counts, ambient_dim, STATUS_CONSENSUS, dims={q: dim for q, _, _ in counts},
                    consensus_codim=ambient_dim - dim, method="fit", detail=shape,
                )
    # rounding consensus on whatever primes are nonempty
    dims = {}
    in_band = True
    for q, raw, _ in counts:
        if raw == 0:
            continue
        d, dev = _round_log_dim(raw, q)
        dims[q] = d
        if dev >= GUARD_BAND:
            in_band = False
    votes = sorted(set(dims.values()))
    if len(votes) == 1 and in_band and len(dims) >= 2:
        d = votes[0]
        return CountReport(
            counts, ambient_dim, STATUS_CONSENSUS, dims=dims,
            consensus_codim=ambient_dim - d, method="rounding",
        )
    lo, hi = votes[0], votes[-1]
    return CountReport(
        counts, ambient_dim, STATUS_AMBIGUOUS, dims=dims,
        codim_interval=(ambient_dim - hi, ambient_dim - lo), method="rounding",
    )


def extract_codim_bucketed(bucket_counts, ambient_dim, totals=None):
    """Codimension of a locus from an exact partition into buckets.

    ``bucket_counts``: dict mapping bucket key -> dict prime -> count.  The
    locus dimension is the max over buckets; buckets decided by the exact
    fit contribute exact dimensions, the rest contribute guarded intervals.
    ``totals`` (per-prime (q, raw, total)) is attached for reporting; when
    omitted it is summed from the buckets with total 0.
    """
    primes = sorted({q for per in bucket_counts.values() for q in per})
    if totals is None:
        sums = {q: 0 for q in primes}
        for per in bucket_counts.values():
            for q, c in per.items():
                sums[q] += c
        totals = tuple((q, sums[q], 0) for q in primes)
    totals = tuple(totals)

    if all(all(c == 0 for c in per.values()) for per in bucket_counts.values()) or not bucket_counts:
        return CountReport(totals, ambient_dim, STATUS_EXACT_EMPTY, method="empty"), {}

    decided_max = None
    low_max = None
    high_max = None
    details = {}
    for key in sorted(bucket_counts):
        per = bucket_counts[key]
        vals = [(q, per.get(q, 0)) for q in primes]
        if all(c == 0 for _, c in vals):
            continue
        if all(c > 0 for _, c in vals):
            fit = cyclotomic_fit(vals)
            if fit is not None:
                dim, shape = fit
                details[key] = ("fit", dim, shape)
                decided_max = dim if decided_max is None else max(decided_max, dim)
                continue
        votes = []
        for q, c in vals:
            if c > 0:
                d, dev = _round_log_dim(c, q)
                votes.append((d, dev))
        lo = min(d for d, _ in votes)
        hi = max(d for d, _ in votes)
        agreed = lo == hi and all(dev < GUARD_BAND for _, dev in votes) and len(votes) >= 2
        if agreed:
            details[key] = ("rounding", lo, "")
            decided_max = lo if decided_max is None else max(decided_max, lo)
        else:
            details[key] = ("interval", (lo, hi), "")
            low_max = lo if low_max is None else max(low_max, lo)
            high_max = hi if high_max is None else max(high_max, hi)

    # A consensus needs a decided bucket on top: undecided buckets may sit
    # strictly below it, but they can never carry the maximum themselves.
    if decided_max is not None and (high_max is None or high_max <= decided_max):
        return (
            CountReport(
                totals, ambient_dim, STATUS_CONSENSUS, dims={},
                consensus_codim=ambient_dim - decided_max, method="buckets",
                detail=f"{len(details)} nonempty buckets",
            ),
            details,
        )
    lo_all = low_max if decided_max is None else max(decided_max, low_max)
    hi_all = high_max if decided_max is None else max(decided_max, high_max)
    return (
        CountReport(
            totals, ambient_dim, STATUS_AMBIGUOUS, dims={},
            codim_interval=(ambient_dim - hi_all, ambient_dim - lo_all), method="buckets",
            detail=f"{len(details)} nonempty buckets, some undecided",
        ),
        details,
    )


def wilson_interval(hits, samples, z=1.96):
    if samples == 0:
        return (0.0, 1.0)
    phat = hits / samples
    denom = 1 + z * z / samples
    center = (phat + z * z / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples + z * z / (4 * samples * samples)) / denom
    return (max(0.0, center - half), min(1.0, center + half))
