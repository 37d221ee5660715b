"""Build length-preserving witnesses for the bundled automorphisms at several horizons.

Prints the winning graph, direction, step and distinguishing word per run,
along with the lengths of a few short test words on both points.
"""
import argparse
import time
from dataclasses import dataclass, field

from cvn_rigidity.formats import load_automorphism
from cvn_rigidity.freegroup import Word
from cvn_rigidity.outerspace import translation_length
from cvn_rigidity.witness import build_witness


@dataclass
class Run:
    path: str
    g: str
    horizons: list[int]
    forward_only: bool = False
    probes: list[str] = field(default_factory=lambda: ["a", "b", "b b", "a b"])


RUNS = [
    Run("data/neg.auto", "b", [10, 100, 1000]),
    Run("data/fib.auto", "a", [8, 16, 25], forward_only=True),
]


def survey(run: Run):
    phi = load_automorphism(run.path)
    for h in run.horizons:
        t0 = time.perf_counter()
        pair, attempts = build_witness(phi, Word.parse(run.g), horizon=h, forward_only=run.forward_only)
        dt = time.perf_counter() - t0
        if pair is None:
            print(f"{run.path} h={h}: no witness ({dt:.2f}s)")
            continue
        print(f"{run.path} h={h}: {pair.T1.name} delta={pair.delta} t={pair.t} "
              f"w*={pair.w_star.format()} ({dt:.2f}s, {len(pair.transcript)} words)")
        for s in run.probes:
            w = Word.parse(s)
            print(f"    {s:>5}: {translation_length(pair.T1, w)} vs {translation_length(pair.T2, w)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smallest horizon only")
    args = ap.parse_args()
    for run in RUNS:
        if args.quick:
            run.horizons = run.horizons[:1]
        survey(run)


if __name__ == "__main__":
    main()
