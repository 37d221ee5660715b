"""Command-line driver: ``analyze``, ``witness`` and ``ttcheck``.

Exit codes: 0 success, 1 input error, 2 no stabilized bound at the
horizon, 3 no witness in the candidate family, 4 a check failed.
Reports are YAML, one key per line, preceded by a timestamp comment.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import formats
from .freegroup import NAMES, CertificateError, FreeMap, Word, cyclic_reduce, orbit
from .formats import FormatError
from .outerspace import MarkingError, crossing_vector, dot, translation_length
from .rigidity import DIRECTIONS, check_property_P, check_property_W, suggest_pair, w_to_wstar
from .trainmap import (
    classify_strata,
    rose_representative,
    stratify,
    verify_good_rtt,
    verify_rtt,
    verify_train_track,
)
from .witness import GRAPH_FAMILIES, build_witness, orbit_sample

log = logging.getLogger("cvn_rigidity")

EXIT_OK, EXIT_INPUT, EXIT_UNSTABLE, EXIT_NO_WITNESS, EXIT_FAIL = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    path: Path | None = None
    g: str = "a"
    horizon: int = 10
    letter: str | None = None
    direction: str = "both"
    graphs: str = "default"
    forward_only: bool = False
    letter_cap: int = 10**7
    max_word_len: int = 6
    recheck: Path | None = None
    out: Path | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.letter_cap < 1 or self.max_word_len < 1:
            raise ValueError("caps must be positive")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if self.graphs not in GRAPH_FAMILIES:
            raise ValueError(f"graphs must be one of {GRAPH_FAMILIES}")


def _emit(cfg: RunConfig, name: str, report: dict) -> None:
    text = formats.dump_yaml(report)
    sys.stdout.write(text)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / name).write_text(text, encoding="utf-8")


def _load_phi(path: Path) -> FreeMap:
    phi = formats.load_automorphism(path)
    if phi.inverse_images is None:
        raise FormatError(f"{path}: inverse_images are required")
    phi.require_certified()
    return phi


# -- analyze -----------------------------------------------------------------

def _letter_scan(phi: FreeMap, g: Word, cand_word: Word, basis: FreeMap | None, cfg: RunConfig) -> dict:
    """Property P bounds for one letter, rewriting the orbit into ``basis`` if needed."""
    if basis is None or cand_word == Word.generator(abs(cand_word[0]) - 1) and len(cand_word) == 1:
        j = abs(cand_word[0]) - 1
        rep = check_property_P(phi, g, j, cfg.horizon, cfg.direction, cfg.letter_cap)
        basis_name = "standard"
        by_dir = rep.by_direction
    else:
        j = next(i for i, w in enumerate(basis.images) if w == cand_word)
        back = basis.inverse()
        by_dir = {}
        spans = {"fwd": (0, cfg.horizon), "bwd": (-cfg.horizon, 0)}
        for d in (("fwd", "bwd") if cfg.direction == "both" else (cfg.direction,)):
            orb = orbit(phi, g, *spans[d], cfg.letter_cap)
            words = [(n, cyclic_reduce(back(w))) for n, w in orb]
            r = check_property_W(words, j, basis="rewritten")
            r.truncations = list(orb.truncations)
            by_dir[d] = r
        basis_name = "images " + ", ".join(w.format() for w in basis.images)
    out: dict = {"word": cand_word.format(), "basis": basis_name, "basis_letter": NAMES[j]}
    for d, r in by_dir.items():
        out[d] = {
            "M": r.M,
            "argmax_n": r.argmax,
            "stabilized": r.stabilized,
            "truncated": bool(r.truncations),
        }
    out["M"] = max(r.M for r in by_dir.values())
    out["stabilized"] = all(r.stabilized for r in by_dir.values())
    out["_basis"] = basis
    out["_j"] = j
    return out


def cmd_analyze(cfg: RunConfig) -> int:
    phi = _load_phi(cfg.path)
    g = Word.parse(cfg.g, phi.rank)
    if not g.letters:
        raise FormatError("--g must be a nontrivial word")
    report: dict = {
        "command": "analyze",
        "automorphism": str(cfg.path),
        "g": g.format(),
        "horizon": cfg.horizon,
        "direction": cfg.direction,
    }
    f = stratify(rose_representative(phi))
    strata = classify_strata(f)
    report["strata"] = [f"H_{s.index} {f.graph.format_path(s.edges)}: {s.kind}" for s in strata]
    if cfg.letter is not None:
        w = Word.parse(cfg.letter, phi.rank)
        if len(w) != 1:
            raise FormatError("--letter must be a single generator")
        cands = [(w.inverse() if w[0] < 0 else w, None, "given on the command line")]
    else:
        try:
            f_inv = stratify(rose_representative(phi.inverse()))
            sugg = suggest_pair(phi, f, f_inv)
        except ValueError as err:
            raise FormatError(f"cannot suggest a letter: {err}; pass --letter") from None
        cands = [(c.word, c.basis, c.reason) for c in sugg]
    scans = []
    for word, basis, reason in cands:
        s = _letter_scan(phi, g, word, basis, cfg)
        s["reason"] = reason
        scans.append(s)
    chosen = next((s for s in scans if s["stabilized"]), scans[0])
    report["letters"] = [{k: v for k, v in s.items() if not k.startswith("_")} for s in scans]
    report["chosen_letter"] = chosen["word"]
    if "fwd" in chosen:
        report["M_plus"] = chosen["fwd"]["M"]
    if "bwd" in chosen:
        report["M_minus"] = chosen["bwd"]["M"]
    report["M"] = chosen["M"]
    report["stabilized"] = chosen["stabilized"]
    if phi.rank == 2:
        sample = orbit_sample(phi, g, cfg.horizon, cfg.direction == "fwd", cfg.letter_cap)
        if cfg.direction == "bwd":
            sample = [(n, w) for n, w in sample if n <= 0]
        basis = chosen["_basis"]
        words = [w for _, w in sample]
        if basis is not None and chosen["basis"] != "standard":
            back = basis.inverse()
            words = [cyclic_reduce(back(w)) for w in words]
        ws = w_to_wstar(words, chosen["M"], chosen["_j"])
        report["wstar"] = {
            "k": ws.k,
            "holds": ws.holds,
            "condition1_violations": [e.sigma.format() for e in ws.condition1][:10],
            "condition2_violations": [f"{e.sigma.format()} (t={e.max_t})" for e in ws.condition2][:10],
        }
    _emit(cfg, "analyze.yaml", report)
    return EXIT_OK if chosen["stabilized"] else EXIT_UNSTABLE


# -- witness -------------------------------------------------------------------

def _frac(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


def cmd_witness(cfg: RunConfig) -> int:
    if cfg.recheck is not None:
        return cmd_recheck(cfg)
    phi = _load_phi(cfg.path)
    g = Word.parse(cfg.g, phi.rank)
    if not g.letters:
        raise FormatError("--g must be a nontrivial word")
    pair, attempts = build_witness(
        phi, g, cfg.horizon, cfg.graphs, forward_only=cfg.forward_only,
        max_word_len=cfg.max_word_len, letter_cap=cfg.letter_cap,
    )
    attempt_lines = [
        f"{a.name}: {a.note}" if a.rank is None else
        f"{a.name}: rank {a.rank}, {a.distinct_rows} distinct rows, "
        + ("success" if a.success else a.note)
        for a in attempts
    ]
    head = {
        "command": "witness",
        "automorphism": formats.automorphism_to_dict(phi),
        "g": g.format(),
        "horizon": cfg.horizon,
        "forward_only": cfg.forward_only,
        "graphs": cfg.graphs,
    }
    if pair is None:
        _emit(cfg, "witness.yaml", {**head, "found": False, "attempts": attempt_lines})
        return EXIT_NO_WITNESS
    report = {
        **head,
        "found": True,
        "graph": pair.T1.name,
        "T1": formats.marked_graph_to_dict(pair.T1),
        "T2": formats.marked_graph_to_dict(pair.T2),
        "delta": list(pair.delta),
        "t": _frac(pair.t),
        "t_star": _frac(pair.t_star),
        "w_star": pair.w_star.format(),
        "w_star_lengths": [str(x) for x in pair.w_star_lengths],
        "sample": pair.sample,
        "identity": pair.identity,
        "attempts": attempt_lines,
        "transcript": [f"n={n} len={k} T1={a} T2={b}" for n, k, a, b in pair.transcript],
    }
    _emit(cfg, "witness.yaml", report)
    return EXIT_OK


def recheck_witness(data: dict) -> list[str]:
    """Re-verify a witness file from its automorphism, sample parameters and graphs."""
    bad = []
    phi = formats.parse_automorphism(data["automorphism"])
    phi.require_certified()
    T1 = formats.parse_marked_graph(data["T1"])
    T2 = formats.parse_marked_graph(data["T2"])
    if not T1.same_marking(T2):
        bad.append("T1 and T2 do not share graph and marking")
        return bad
    delta = [int(x) for x in data["delta"]]
    t = Fraction(str(data["t"]))
    if any(a + t * d != b for a, b, d in zip(T1.lengths, T2.lengths, delta)):
        bad.append("T2 lengths are not T1 + t*delta")
    if any(x <= 0 for x in T2.lengths):
        bad.append("T2 has a non-positive length")
    g = Word.parse(str(data["g"]), phi.rank)
    h = int(data["horizon"])
    lo = 0 if data.get("forward_only") else -h
    seen = 0
    for n, w in orbit(phi, g, lo, h):
        c = crossing_vector(T1, w)
        if dot(c, T1.lengths) != dot(c, T2.lengths):
            bad.append(f"lengths differ at n={n}")
        seen += 1
    if seen != len(data.get("transcript", [])):
        bad.append(f"transcript has {len(data.get('transcript', []))} entries, sample has {seen}")
    w_star = Word.parse(str(data["w_star"]), phi.rank)
    if translation_length(T1, w_star) == translation_length(T2, w_star):
        bad.append("certificate word does not distinguish T1 from T2")
    return bad


def cmd_recheck(cfg: RunConfig) -> int:
    data = formats.load_yaml(cfg.recheck)
    try:
        bad = recheck_witness(data)
    except KeyError as err:
        raise FormatError(f"{cfg.recheck}: missing field {err}") from None
    _emit(cfg, "recheck.yaml", {"command": "recheck", "file": str(cfg.recheck), "valid": not bad, "failures": bad})
    return EXIT_OK if not bad else EXIT_FAIL


# -- ttcheck -------------------------------------------------------------------

def cmd_ttcheck(cfg: RunConfig) -> int:
    f, given = formats.load_toprep(cfg.path)
    if not given:
        f = stratify(f)
    g = f.graph
    tt = verify_train_track(f)
    rtt = verify_rtt(f)
    good = verify_good_rtt(f, rtt)
    report: dict = {
        "command": "ttcheck",
        "file": str(cfg.path),
        "filtration": "from file" if given else "computed from the occurrence digraph",
        "strata": [],
        "train_track": tt.is_train_track,
        "illegal_turns": [
            f"{g.name(e)} position {i}: {orb.format(g)}" for e, i, orb in tt.illegal
        ],
    }
    for s in rtt.strata:
        line = f"H_{s.index} {g.format_path(s.edges)}: {s.kind}"
        if s.pf is not None and s.kind == "EG":
            line += f", PF {s.pf.value:.10f} ({s.pf.certificate})"
        report["strata"].append(line)
    if tt.cancellation is not None:
        c = tt.cancellation
        report["cancellation"] = f"f^{c.n}({g.name(c.edge)}) cancels at position {c.position}: {g.format_path(c.unreduced)}"
    report["rtt"] = rtt.passed
    report["rtt_conditions"] = {c.name: c.passed for c in rtt.conditions}
    report["rtt_failures"] = [f"{c.name}: {d}" for c in rtt.conditions if not c.passed for d in c.detail]
    report["good_rtt"] = good.passed
    report["good_rtt_conditions"] = {c.name: c.passed for c in good.conditions}
    report["good_rtt_details"] = [f"{c.name}: {d}" for c in good.conditions for d in c.detail]
    report["convention_power"] = good.convention_power
    _emit(cfg, "ttcheck.yaml", report)
    ok = tt.is_train_track and rtt.passed and good.passed
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvn-rigidity", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", type=Path, help="directory for report files")

    a = sub.add_parser("analyze", help="bounded-power evidence along an orbit")
    a.add_argument("path", type=Path)
    a.add_argument("--g", default="a")
    a.add_argument("--horizon", type=int, default=10)
    a.add_argument("--letter")
    a.add_argument("--direction", choices=DIRECTIONS, default="both")
    a.add_argument("--letter-cap", type=int, default=10**7)
    common(a)

    w = sub.add_parser("witness", help="search for a pair of graphs with equal lengths on the orbit")
    w.add_argument("path", type=Path, nargs="?")
    w.add_argument("--g", default="a")
    w.add_argument("--horizon", type=int, default=10)
    w.add_argument("--graphs", choices=GRAPH_FAMILIES, default="default")
    w.add_argument("--forward-only", action="store_true")
    w.add_argument("--letter-cap", type=int, default=10**7)
    w.add_argument("--max-word-len", type=int, default=6)
    w.add_argument("--recheck", type=Path, help="re-verify an existing witness file")
    common(w)

    t = sub.add_parser("ttcheck", help="verify train track conditions of a topological representative")
    t.add_argument("path", type=Path)
    common(t)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    return RunConfig(**fields)


COMMANDS = {"analyze": cmd_analyze, "witness": cmd_witness, "ttcheck": cmd_ttcheck}


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        if cfg.command == "witness" and cfg.path is None and cfg.recheck is None:
            raise FormatError("witness needs an automorphism file or --recheck FILE")
        return COMMANDS[cfg.command](cfg)
    except (FormatError, CertificateError, MarkingError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
