"""Exact distribution of contact orders over finite-field jet spaces.

The basic object computed here is, for a list of polynomials p_1..p_k on
A^n and a jet level N over F_q, the exact count of jets by the vector of
clamped pullback orders (ord values live in {0..N} with N+1 standing for
"vanishes to this level").  Everything downstream (contact counts, lambda
strata, lct cells) is a reduction of such a table.

Three exact strategies, chosen by cost:

* direct      -- vectorized enumeration of the full coefficient grid.
* shift split -- a variable that occurs exactly once in the whole list,
                 as a lone constant-coefficient degree-1 term, acts as a
                 uniform shift; its generator's order distribution is the
                 unconditional one, independently of everything else, so
                 those variables never need to be enumerated.
* add split   -- when the term-cooccurrence graph of the variables is
                 disconnected, the list splits into two blocks sharing at
                 most one additively-split polynomial; each block is
                 enumerated separately and the blocks are convolved by
                 matching value prefixes.

All three produce identical tables; the test suite cross-checks them
against each other and against the pure-Python jet enumeration.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded, InternalInvariantError
from .jets import DEFAULT_BUDGET

DEFAULT_BATCH_CAP = 1 << 22
_MAX_COMBINE = 1 << 26


# --------------------------------------------------------------------------
# batched grids and series arithmetic mod q
# --------------------------------------------------------------------------


def iter_digit_batches(width, q, batch_cap=DEFAULT_BATCH_CAP, total=None):
    """Yield (B, width) integer arrays covering the odometer grid of base-q digits.

    The low digits cycle with period q^w, so one cached block is tiled and
    only the remaining high digits are computed per batch.
    """
    if total is None:
        total = q**width
    if total > 2**62:  # pragma: no cover - beyond any practical budget
        raise BudgetExceeded("grid too large to index")

    w = 0
    while w < width and q ** (w + 1) <= min(batch_cap, total):
        w += 1
    block = q**w
    cache = np.empty((block, w), dtype=np.int32)
    rem = np.arange(block, dtype=np.int64)
    for pos in range(w):
        rem, d = np.divmod(rem, q)
        cache[:, pos] = d

    n_highs = (total + block - 1) // block
    highs_per_batch = max(1, min(batch_cap // block, n_highs))
    buf = None
    for h0 in range(0, n_highs, highs_per_batch):
        h1 = min(h0 + highs_per_batch, n_highs)
        rows = min(total, h1 * block) - h0 * block
        if buf is None or buf.shape[0] < rows:
            buf = np.empty((highs_per_batch * block, width), dtype=np.int32)
            reps = (buf.shape[0] + block - 1) // block
            buf[:, :w] = np.tile(cache, (reps, 1))[: buf.shape[0]]
        digits = buf[:rows]
        if w < width:
            rem = np.repeat(np.arange(h0, h1, dtype=np.int64), block)[:rows]
            for pos in range(w, width):
                rem, d = np.divmod(rem, q)
                digits[:, pos] = d
        # the buffer is reused between iterations: consume before advancing
        yield digits


def batch_conv(a, b, q):
    """Truncated product of batched series: (B, N+1) x (B, N+1) -> (B, N+1).

    Coefficients stay reduced mod q, so int32 accumulation is safe for the
    primes used in counting (guarded at entry to the distribution engine).
    """
    n1 = a.shape[-1]
    out = np.zeros_like(a)
    tmp = np.empty(a.shape[0], dtype=a.dtype)
    for k in range(n1):
        acc = out[:, k]
        for i in range(k + 1):
            np.multiply(a[:, i], b[:, k - i], out=tmp)
            acc += tmp
        np.mod(acc, q, out=acc)
    return out


def batch_ord(series, level):
    """Order of batched series; the sentinel level+1 marks identically-zero rows."""
    nz = series != 0
    has = nz.any(axis=-1)
    first = np.argmax(nz, axis=-1)
    return np.where(has, first, level + 1).astype(np.int64)


def eval_poly_batch(poly, coords, q):
    """Pullback series of a polynomial on a batch of jets.

    ``coords`` has shape (B, n, N+1); coefficients of ``poly`` are reduced
    mod q.  Returns (B, N+1).
    """
    var = _plain_variable_index(poly)
    if var is not None:
        return coords[:, var, :]
    B, n, width = coords.shape
    out = np.zeros((B, width), dtype=coords.dtype)
    powers = [dict() for _ in range(n)]

    def power(i, e):
        if e == 1:
            return coords[:, i, :]
        cache = powers[i]
        if e not in cache:
            half = power(i, e // 2)
            sq = batch_conv(half, half, q)
            cache[e] = sq if e % 2 == 0 else batch_conv(sq, coords[:, i, :], q)
        return cache[e]

    for exps, coeff in poly.terms.items():
        c = int(coeff) % q  # callers hand over GF(q) polynomials
        if c == 0:
            continue
        term = None
        for i, e in enumerate(exps):
            if e == 0:
                continue
            factor = power(i, e)
            term = factor if term is None else batch_conv(term, factor, q)
        if term is None:
            out[:, 0] += c  # constant term
        elif c == 1:
            out += term
        else:
            out += c * term
    np.mod(out, q, out=out)
    return out


def _plain_variable_index(poly):
    """Index of v when poly == 1*v, else None (enables the no-copy fast path)."""
    if len(poly.terms) != 1:
        return None
    (exps, c), = poly.terms.items()
    if int(c) != 1 or sum(exps) != 1:
        return None
    return exps.index(1)


# --------------------------------------------------------------------------
# key handling
# --------------------------------------------------------------------------


def _encode_ord_vectors(ord_cols, level):
    """Mixed-radix encode a list of (B,) ord arrays into one int64 code array."""
    base = level + 2
    code = np.zeros_like(ord_cols[0])
    for col in reversed(ord_cols):
        code = code * base + col
    return code


def _decode_ord_code(code, k, level):
    base = level + 2
    out = []
    for _ in range(k):
        out.append(int(code % base))
        code //= base
    return tuple(out)


def _accumulate(table, codes, k, level):
    """Add the batch's code counts into the running python dict."""
    uniq, cnt = np.unique(codes, return_counts=True)
    for code, c in zip(uniq.tolist(), cnt.tolist()):
        key = _decode_ord_code(code, k, level)
        table[key] = table.get(key, 0) + int(c)


# --------------------------------------------------------------------------
# strategy: direct enumeration
# --------------------------------------------------------------------------


def _direct_distribution(polys, n, level, q, batch_cap):
    width = n * (level + 1)
    if not polys:
        return {(): q**width}
    k = len(polys)
    base = level + 2
    dense_size = base**k
    use_bincount = dense_size <= (1 << 22)
    dense = np.zeros(dense_size, dtype=np.int64) if use_bincount else None
    table = {}
    var_slots = [(i, _plain_variable_index(p)) for i, p in enumerate(polys)]
    plain = {i: v for i, v in var_slots if v is not None}
    for digits in iter_digit_batches(width, q, batch_cap):
        coords = digits.reshape(digits.shape[0], n, level + 1)
        coord_ords = None
        if plain:
            coord_ords = batch_ord(coords, level)  # (B, n) in one pass
        cols = []
        for i, p in enumerate(polys):
            if i in plain:
                cols.append(coord_ords[:, plain[i]])
            else:
                cols.append(batch_ord(eval_poly_batch(p, coords, q), level))
        codes = _encode_ord_vectors(cols, level)
        if use_bincount:
            dense += np.bincount(codes, minlength=dense_size)
        else:
            _accumulate(table, codes, k, level)
    if use_bincount:
        for code in np.nonzero(dense)[0].tolist():
            table[_decode_ord_code(code, k, level)] = int(dense[code])
    return table


# --------------------------------------------------------------------------
# strategy: shift split
# --------------------------------------------------------------------------


def _variable_occurrences(polys, n):
    """occ[v] = list of (poly index, exponent vector) of terms containing v."""
    occ = [[] for _ in range(n)]
    for pi, p in enumerate(polys):
        for exps in p.terms:
            for v, e in enumerate(exps):
                if e:
                    occ[v].append((pi, exps))
    return occ


def _find_shift_assignment(polys, n):
    """Map poly index -> shift variable, for variables usable as uniform shifts."""
    occ = _variable_occurrences(polys, n)
    assigned = {}
    used_polys = set()
    for v in range(n):
        if len(occ[v]) != 1:
            continue
        pi, exps = occ[v][0]
        if pi in used_polys:
            continue
        # the term must be exactly c * v
        if exps[v] != 1 or any(e for w, e in enumerate(exps) if w != v):
            continue
        assigned[pi] = v
        used_polys.add(pi)
    return assigned


def ord_value_counts(level, q):
    """How many level-N series have each order: (q-1) q^(N-e), and 1 for the sentinel."""
    d = [(q - 1) * q ** (level - e) for e in range(level + 1)]
    d.append(1)
    return d


def _shift_split_distribution(polys, n, level, q, budget, batch_cap):
    assigned = _find_shift_assignment(polys, n)
    if not assigned:
        return None
    shift_vars = sorted(assigned.values())
    keep_vars = [v for v in range(n) if v not in shift_vars]
    b_width = len(keep_vars) * (level + 1)
    if q**b_width > budget:
        return None

    # Re-express the non-shift polynomials over the kept variables.
    keep_names = [polys[0].variables[v] for v in keep_vars] if polys else []
    b_polys = []
    b_index = []
    for pi, p in enumerate(polys):
        if pi in assigned:
            continue
        reduced = _restrict_poly(p, keep_vars, keep_names)
        if reduced is None:
            return None  # mentions a shift variable: not eligible
        b_polys.append(reduced)
        b_index.append(pi)

    if keep_vars:
        b_table = _direct_distribution(b_polys, len(keep_vars), level, q, batch_cap)
    else:
        b_table = {(): 1}

    dvals = ord_value_counts(level, q)
    shift_polys = sorted(assigned)  # poly indices using a shift variable
    table = {}

    def expand(prefix_counts):
        # tensor the unconditional order distribution for each shift poly
        items = list(prefix_counts.items())
        for _ in shift_polys:
            nxt = []
            for key, cnt in items:
                for e, d in enumerate(dvals):
                    nxt.append((key + (e,), cnt * d))
            items = nxt
        return items

    for b_key, b_count in b_table.items():
        for tail, cnt in expand({(): b_count}):
            full = [None] * len(polys)
            for slot, e in zip(b_index, b_key):
                full[slot] = e
            for slot, e in zip(shift_polys, tail):
                full[slot] = e
            table_key = tuple(full)
            table[table_key] = table.get(table_key, 0) + cnt
    return table


def _restrict_poly(p, keep_vars, keep_names):
    """View p in the kept variables; None if it mentions a dropped one."""
    out_terms = {}
    for exps, c in p.terms.items():
        new = []
        for v in keep_vars:
            new.append(exps[v])
        if sum(exps) != sum(new):
            return None
        out_terms[tuple(new)] = c
    from .poly import MultiPoly

    r = MultiPoly(p.field, keep_names)
    r.terms = dict(out_terms)
    return r


# --------------------------------------------------------------------------
# strategy: additive split
# --------------------------------------------------------------------------


def _term_components(polys, n):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for p in polys:
        for exps in p.terms:
            vs = [v for v, e in enumerate(exps) if e]
            for a, b in zip(vs, vs[1:]):
                union(a, b)
    comps = {}
    for v in range(n):
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def _negation_permutation(q, width):
    codes = np.arange(q**width, dtype=np.int64)
    neg = np.zeros_like(codes)
    rem = codes.copy()
    mult = 1
    for _ in range(width):
        d = rem % q
        neg += ((q - d) % q) * mult
        rem //= q
        mult *= q
    return neg


def _side_table(polys_side, split_part, side_vars, all_names, level, q, batch_cap):
    """Enumerate one block: counts indexed by (ord-key of side polys, value code
    of the split polynomial's part on this side)."""
    names = [all_names[v] for v in side_vars]
    reduced = [_restrict_poly(p, side_vars, names) for p in polys_side]
    split_red = _restrict_poly(split_part, side_vars, names) if split_part is not None else None
    n_side = len(side_vars)
    width = n_side * (level + 1)
    vwidth = level + 1
    vspace = q**vwidth

    out = {}
    for digits in iter_digit_batches(width, q, batch_cap):
        coords = digits.reshape(digits.shape[0], n_side, level + 1)
        cols = [batch_ord(eval_poly_batch(p, coords, q), level) for p in reduced]
        key_code = _encode_ord_vectors(cols, level) if cols else np.zeros(digits.shape[0], dtype=np.int64)
        if split_red is not None:
            vals = eval_poly_batch(split_red, coords, q)
            vcode = np.zeros(digits.shape[0], dtype=np.int64)
            mult = 1
            for j in range(vwidth):
                vcode += vals[:, j] * mult
                mult *= q
        else:
            vcode = np.zeros(digits.shape[0], dtype=np.int64)
        uniq, cnt = np.unique(key_code * vspace + vcode, return_counts=True)
        for code, c in zip(uniq.tolist(), cnt.tolist()):
            kc, vc = divmod(code, vspace)
            key = _decode_ord_code(kc, len(reduced), level)
            vec = out.setdefault(key, np.zeros(vspace, dtype=np.int64))
            vec[vc] += c
    return out


def _additive_split_distribution(polys, n, level, q, budget, batch_cap):
    if n < 2:
        return None
    comps = _term_components(polys, n)
    if len(comps) < 2:
        return None
    # Greedy balance of components over two blocks by digit width.
    comps = sorted(comps, key=len, reverse=True)
    block_a, block_b = [], []
    for comp in comps:
        (block_a if sum(map(len, block_a)) <= sum(map(len, block_b)) else block_b).append(comp)
    vars_a = sorted(v for comp in block_a for v in comp)
    vars_b = sorted(v for comp in block_b for v in comp)
    if not vars_a or not vars_b:
        return None
    wa, wb = len(vars_a) * (level + 1), len(vars_b) * (level + 1)
    if q**wa > budget or q**wb > budget:
        return None

    set_a = set(vars_a)
    side_a_polys, side_b_polys, split_idx = [], [], []
    split_poly = None
    for pi, p in enumerate(polys):
        sides = set()
        for exps in p.terms:
            vs = {v for v, e in enumerate(exps) if e}
            if vs <= set_a:
                sides.add("A")
            elif vs and not (vs & set_a):
                sides.add("B")
            elif not vs:
                sides.add("const")
            else:
                return None  # a term straddles the blocks: components were wrong
        if sides <= {"A", "const"} and "A" in sides:
            side_a_polys.append((pi, p))
        elif sides <= {"B", "const"} and "B" in sides:
            side_b_polys.append((pi, p))
        elif sides == {"const"} or not sides:
            side_a_polys.append((pi, p))  # constant: evaluate anywhere
        else:
            if split_poly is not None:
                return None  # at most one additively split polynomial
            split_poly = (pi, p)
            split_idx.append(pi)

    names = polys[0].variables if polys else ()

    def split_parts(p):
        from .poly import MultiPoly

        pa = MultiPoly(p.field, names)
        pb = MultiPoly(p.field, names)
        ta, tb = {}, {}
        for exps, c in p.terms.items():
            vs = {v for v, e in enumerate(exps) if e}
            (ta if (vs <= set_a) else tb)[exps] = c
        pa.terms, pb.terms = ta, tb
        return pa, pb

    part_a = part_b = None
    if split_poly is not None:
        part_a, part_b = split_parts(split_poly[1])

    tab_a = _side_table([p for _, p in side_a_polys], part_a, vars_a, names, level, q, batch_cap)
    tab_b = _side_table([p for _, p in side_b_polys], part_b, vars_b, names, level, q, batch_cap)

    if len(tab_a) * len(tab_b) * (q ** (level + 1)) > _MAX_COMBINE:
        return None

    vwidth = level + 1
    # prefix-collapsed copies of each side's value vectors, per order threshold
    neg = {o: _negation_permutation(q, o) for o in range(vwidth + 1)}

    def prefixes(vec):
        return {o: vec.reshape(-1, q**o).sum(axis=0) for o in range(vwidth + 1)}

    pa = {k: prefixes(v) for k, v in tab_a.items()}
    pb = {k: prefixes(v) for k, v in tab_b.items()}

    table = {}
    for ka, va in pa.items():
        for kb, vb in pb.items():
            if split_poly is None:
                total = int(va[0][0] * vb[0][0])
                counts_by_ord = {None: total}
            else:
                geq = []
                for o in range(vwidth + 1):
                    geq.append(int(np.dot(va[o], vb[o][neg[o]])))
                counts_by_ord = {}
                for o in range(vwidth):
                    c = geq[o] - geq[o + 1]
                    if c:
                        counts_by_ord[o] = c
                if geq[vwidth]:
                    counts_by_ord[level + 1] = geq[vwidth]
            for o, c in counts_by_ord.items():
                full = [None] * len(polys)
                for (pi, _), e in zip(side_a_polys, ka):
                    full[pi] = e
                for (pi, _), e in zip(side_b_polys, kb):
                    full[pi] = e
                if split_poly is not None:
                    full[split_poly[0]] = o
                key = tuple(full)
                table[key] = table.get(key, 0) + c
    return table


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------


def _shift_split_cost(polys, n, level, q):
    assigned = _find_shift_assignment(polys, n)
    if not assigned:
        return None
    b_width = (n - len(assigned)) * (level + 1)
    return q**b_width


def _additive_split_cost(polys, n, level, q):
    if n < 2:
        return None
    comps = _term_components(polys, n)
    if len(comps) < 2:
        return None
    comps = sorted(comps, key=len, reverse=True)
    size_a = size_b = 0
    for comp in comps:
        if size_a <= size_b:
            size_a += len(comp)
        else:
            size_b += len(comp)
    if not size_a or not size_b:
        return None
    return q ** (size_a * (level + 1)) + q ** (size_b * (level + 1))


def ord_vector_distribution(
    polys, n, level, q, budget=DEFAULT_BUDGET, batch_cap=DEFAULT_BATCH_CAP, prefer="direct"
):
    """Exact jet counts keyed by the clamped order vector of the given polynomials.

    Keys are tuples with one entry per polynomial, each in {0..level} or
    level+1 (the truncation sentinel).  ``prefer`` is "direct" (full
    enumeration whenever it fits the budget, split strategies as fallback)
    or "cheapest" (lowest estimated enumeration cost first).  All
    strategies are exact and interchangeable.  Raises BudgetExceeded when
    nothing fits.
    """
    if q > 2**15:
        raise BudgetExceeded(f"vectorized counting restricted to primes below 2^15, got {q}")
    from .fields import GF

    gfq = GF(q)
    polys = [p if p.field == gfq else p.map_coeffs(gfq) for p in polys]
    size = q ** (n * (level + 1))

    plans = [("direct", size)]
    c1 = _shift_split_cost(polys, n, level, q)
    if c1 is not None:
        plans.append(("shift", c1))
    c2 = _additive_split_cost(polys, n, level, q)
    if c2 is not None:
        plans.append(("additive", c2))
    if prefer == "cheapest":
        order = [name for name, cost in sorted(plans, key=lambda nc: nc[1]) if cost <= budget]
    else:
        order = [name for name, cost in plans if cost <= budget]
    # keep the remaining strategies as fallbacks; they self-check the budget
    for name in ("direct", "shift", "additive"):
        if name not in order and any(n2 == name for n2, _ in plans):
            order.append(name)

    for name in order:
        if name == "direct":
            if size <= budget:
                return _direct_distribution(polys, n, level, q, batch_cap)
            continue
        if name == "shift":
            t = _shift_split_distribution(polys, n, level, q, budget, batch_cap)
        else:
            t = _additive_split_distribution(polys, n, level, q, budget, batch_cap)
        if t is not None:
            return t
    raise BudgetExceeded(
        f"jet space has {size} points, over the budget {budget}, and no exact split applies"
    )


def distribution_total(table):
    return sum(table.values())


def sample_ord_hits(gens, n, level, q, mode, m, samples, rng, batch_cap=DEFAULT_BATCH_CAP):
    """Monte Carlo hit count for an order condition; returns (hits, samples)."""
    from .fields import GF

    gfq = GF(q)
    gens = [g if g.field == gfq else g.map_coeffs(gfq) for g in gens]
    width = n * (level + 1)
    hits = 0
    done = 0
    while done < samples:
        b = min(batch_cap, samples - done)
        digits = rng.integers(0, q, size=(b, width), dtype=np.int64)
        coords = digits.reshape(b, n, level + 1)
        best = None
        for g in gens:
            o = batch_ord(eval_poly_batch(g, coords, q), level)
            best = o if best is None else np.minimum(best, o)
        if mode == "exact":
            hits += int((best == m).sum())
        else:
            hits += int((best >= m).sum())
        done += b
    return hits, samples


def check_tables_equal(t1, t2):
    """Used by tests: exact equality of two distribution tables."""
    if t1 != t2:
        raise InternalInvariantError("distribution strategies disagree")
    return True
