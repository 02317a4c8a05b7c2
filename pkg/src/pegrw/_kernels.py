"""Hot loop of the frame machine over a flattened program.

The kernel is written once.  With numba available it is compiled with
``@njit``; set ``PEGRW_NO_JIT=1`` to run the same code as plain Python over
lists instead.  Both paths are always importable as ``run_jit`` (None when
numba is missing) and ``run_py`` so that they can be benchmarked side by side.
"""
from __future__ import annotations

import os

import numpy as np

from .program import CATCH, CHOICE, CUT, EMPTY, NOT, NT, SEQ, STAR, TERM, THROW, TRY, Program

# frame kinds
F_SEQ, F_CHOICE, F_STAR, F_STARC, F_NEG, F_CATCH, F_TRY = range(7)
# status codes
DONE, OVER_BUDGET, STRAY_CUT = 0, 1, 2

_INITIAL_FRAMES = 64


def _run(kind, a, b, t_off, t_lo, t_hi, t_neg, root, inp, simplify, budget, fk, fn, fp, grow):
    """Returns (result kind, position, entry steps, total steps, max depth, status)."""
    n = len(inp)
    sp = 0
    node = root
    pos = 0
    res = 0
    evaluating = True
    entry = 0
    total = 0
    maxd = 0
    status = DONE
    while True:
        if not evaluating and sp == 0:
            break
        if total >= budget:
            status = OVER_BUDGET
            break
        total += 1
        pk = -1
        pn = 0
        pp = 0
        if evaluating:
            entry += 1
            k = kind[node]
            if k == TERM:
                evaluating = False
                res = 1
                if pos < n:
                    t = a[node]
                    c = inp[pos]
                    hit = False
                    for q in range(t_off[t], t_off[t + 1]):
                        if t_lo[q] <= c and c <= t_hi[q]:
                            hit = True
                            break
                    if hit != (t_neg[t] != 0):
                        res = 0
                        pos += 1
            elif k == NT:
                node = a[node]
            elif k == SEQ:
                pk = F_SEQ
                pn = b[node]
                node = a[node]
            elif k == CHOICE:
                pk = F_CHOICE
                pn = b[node]
                pp = pos
                node = a[node]
            elif k == STAR:
                pk = F_STAR
                pn = a[node]
                pp = pos
                node = a[node]
            elif k == NOT:
                pk = F_NEG
                pp = pos
                node = a[node]
            elif k == EMPTY:
                evaluating = False
                res = 0
            elif k == THROW:
                evaluating = False
                res = 2
            elif k == CATCH:
                pk = F_CATCH
                node = a[node]
            elif k == TRY:
                if simplify:
                    while sp > 0 and fk[sp - 1] == F_CHOICE:
                        sp -= 1
                pk = F_TRY
                node = a[node]
            elif k == CUT:
                j = sp - 1
                while j >= 0 and fk[j] != F_CHOICE and fk[j] != F_STAR:
                    j -= 1
                if j < 0:
                    status = STRAY_CUT
                    break
                if fk[j] == F_CHOICE:
                    for q in range(j, sp - 1):
                        fk[q] = fk[q + 1]
                        fn[q] = fn[q + 1]
                        fp[q] = fp[q + 1]
                    sp -= 1
                else:
                    fk[j] = F_STARC
                evaluating = False
                res = 0
        else:
            sp -= 1
            f = fk[sp]
            if f == F_SEQ:
                if res == 0:
                    evaluating = True
                    node = fn[sp]
            elif f == F_CHOICE:
                if res == 1:
                    evaluating = True
                    node = fn[sp]
                    pos = fp[sp]
            elif f == F_STAR or f == F_STARC:
                if res == 0:
                    evaluating = True
                    node = fn[sp]
                    pk = F_STAR
                    pn = node
                    pp = pos
                elif res == 1 and f == F_STAR:
                    res = 0
                    pos = fp[sp]
            elif f == F_NEG:
                res = 1 if res == 0 else 0
                pos = fp[sp]
            elif f == F_CATCH:
                if res == 2:
                    res = 1
            elif f == F_TRY:
                if res == 1:
                    res = 2
        if pk >= 0:
            if sp == len(fk):
                fk = grow(fk)
                fn = grow(fn)
                fp = grow(fp)
            fk[sp] = pk
            fn[sp] = pn
            fp[sp] = pp
            sp += 1
            if sp > maxd:
                maxd = sp
    return res, pos, entry, total, maxd, status


def _grow_array(arr):
    out = np.empty(2 * len(arr), dtype=arr.dtype)
    out[: len(arr)] = arr
    return out


def _grow_list(lst):
    return lst + [0] * len(lst)


def run_py(prog: Program, x: str, simplify: bool, budget: int) -> tuple:
    kind, a, b, t_off, t_lo, t_hi, t_neg = prog.lists()
    inp = [ord(c) for c in x]
    frames = [0] * _INITIAL_FRAMES
    return _run(kind, a, b, t_off, t_lo, t_hi, t_neg, prog.root, inp, simplify, budget,
                frames, list(frames), list(frames), _grow_list)


try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

if njit is not None:
    _grow_jit = njit(cache=True)(_grow_array)
    _run_jit = njit(cache=True)(_run)

    def run_jit(prog: Program, x: str, simplify: bool, budget: int) -> tuple:
        from .program import encode_input
        frames = np.zeros(_INITIAL_FRAMES, dtype=np.int64)
        out = _run_jit(*prog.arrays(), prog.root, encode_input(x), simplify, budget,
                       frames, frames.copy(), frames.copy(), _grow_jit)
        return tuple(int(v) for v in out)
else:  # pragma: no cover
    run_jit = None

JIT_ENABLED = run_jit is not None and os.environ.get("PEGRW_NO_JIT", "") not in ("1", "true", "yes")
run_program = run_jit if JIT_ENABLED else run_py
