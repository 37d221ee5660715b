"""Scan the largest power of a basis letter along an orbit, horizon by horizon.

    python scripts/power_scan.py data/fib.auto --g a --letter a --horizon 14
"""
import argparse
from dataclasses import dataclass

from cvn_rigidity.formats import load_automorphism
from cvn_rigidity.freegroup import Word, max_power, orbit
from cvn_rigidity.trainmap import stabilized


@dataclass
class ScanConfig:
    path: str
    g: str = "a"
    letter: str = "a"
    horizon: int = 12
    letter_cap: int = 10**7


def scan(cfg: ScanConfig):
    phi = load_automorphism(cfg.path)
    g = Word.parse(cfg.g, phi.rank)
    (i,) = [abs(x) - 1 for x in Word.parse(cfg.letter, phi.rank).letters]
    rows = []
    for direction, (lo, hi) in (("fwd", (0, cfg.horizon)), ("bwd", (-cfg.horizon, 0))):
        running, seen = 0, []
        for n, w in orbit(phi, g, lo, hi, cfg.letter_cap):
            running = max(running, max_power(w, i))
            seen.append(running)
            rows.append((direction, n, len(w), max_power(w, i), running))
        rows.append((direction, "stabilized", stabilized(seen)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path")
    ap.add_argument("--g", default="a")
    ap.add_argument("--letter", default="a")
    ap.add_argument("--horizon", type=int, default=12)
    args = ap.parse_args()
    cfg = ScanConfig(args.path, args.g, args.letter, args.horizon)
    print("direction  n  length  power  running_max")
    for row in scan(cfg):
        print("  ".join(str(x) for x in row))


if __name__ == "__main__":
    main()
