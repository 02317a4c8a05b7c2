"""Compare the compiled machine kernel, the same kernel as plain Python, and the
object-level step machine, on a^k b^k c^k and on the bundled JSON samples.

    python3 benchmarks/bench_kernels.py [--reps 5] [--sizes 100 1000 10000]
"""
import argparse
import time
from importlib import resources

from pegrw import _kernels, machine
from pegrw.program import compile_program
from pegrw.reader import load_grammar, parse_grammar


def best_of(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench(label, g, x, reps, with_objects):
    prog = compile_program(g)
    rows = []
    if _kernels.run_jit is not None:
        _kernels.run_jit(prog, x[:10], True, 10**9)  # compile or load the cache
        rows.append(("jit", *best_of(lambda: _kernels.run_jit(prog, x, True, 10**9), reps)))
    rows.append(("python", *best_of(lambda: _kernels.run_py(prog, x, True, 10**9), reps)))
    if with_objects:
        t, (out, m) = best_of(lambda: machine.run(g, g.start, x, engine="python"), 1)
        rows.append(("objects", t, (int(out.kind), len(x) - len(out.rest), m.entry_steps,
                                    m.total_steps, m.max_stack_depth, 0)))
    ref = rows[0][2]
    for name, t, out in rows:
        assert out[:5] == ref[:5], (name, out, ref)
        print(f"{label:<22} {name:<8} {t * 1e3:10.3f} ms   entry={out[2]} total={out[3]} depth={out[4]}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    args = ap.parse_args()
    fixtures = resources.files("pegrw") / "fixtures"
    g = parse_grammar((fixtures / "anbncn.peg").read_text())
    for k in args.sizes:
        bench(f"anbncn k={k}", g, "a" * k + "b" * k + "c" * k, args.reps, with_objects=k <= 1000)
    js = load_grammar(fixtures / "json_plain.peg")
    text = "[" + ",".join((fixtures / "json" / f).read_text() for f in
                          ("config.json", "users.json", "geo.json", "log.json")) + "]"
    bench(f"json {len(text)} chars", js, text * 1, args.reps, with_objects=True)


if __name__ == "__main__":
    main()
