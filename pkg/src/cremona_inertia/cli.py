"""Command line front end.

Every command reads a job (``--config`` JSON plus flag overrides), prints one
JSON report on stdout and a one-line summary on stderr, and exits with 0 when
every postcondition held, 2 on a verification failure, 3 on a recoverable
error (a change of base field may help), 4 on malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from .algebra import Field, PlanePoint
from .curve import CubicCurve, MarkedPointSet, marked_set_build
from .errors import CremonaError, InputError
from . import maps, picard

COMMANDS = ("curve-check", "sigma", "compose", "verify", "basepoints", "certify", "degree-crosscheck")


@dataclass
class JobConfig:
    command: str
    field: str = "Q"
    curve: object = None  # equation string or 10 coefficients
    points: list = dc_field(default_factory=list)
    word: Optional[list] = None  # positions in ``points``
    max_len: Optional[int] = None
    abstract: Optional[int] = None  # number of generators in abstract mode
    inflexion: list = dc_field(default_factory=list)
    formal: bool = False  # formal labels for tangency points off the base field
    map: Optional[dict] = None
    workers: int = 1

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("workers")  # sharding must not change the report
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _read_json_or_text(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip()


def build_config(args) -> JobConfig:
    base = {}
    if args.config:
        base = _read_json_or_text(args.config)
        if not isinstance(base, dict):
            raise InputError("--config must hold a JSON object")
    cfg = JobConfig(command=args.command)
    known = set(JobConfig.__dataclass_fields__) - {"command"}
    for k, v in base.items():
        if k not in known:
            raise InputError(f"unknown config key {k!r}")
        setattr(cfg, k, v)
    if args.field:
        cfg.field = args.field
    if args.curve:
        cfg.curve = _read_json_or_text(args.curve)
    if args.equation:
        cfg.curve = args.equation
    if args.points:
        cfg.points = _read_json_or_text(args.points)
    if args.point:
        cfg.points = [[c.strip() for c in s.split(",")] for s in args.point]
    if args.word is not None:
        try:
            cfg.word = [int(t) for t in args.word.split(",") if t.strip()]
        except ValueError:
            raise InputError(f"bad word {args.word!r}") from None
    if args.max_len is not None:
        cfg.max_len = args.max_len
    if args.abstract is not None:
        cfg.abstract = args.abstract
    if args.inflexion:
        cfg.inflexion = [int(t) for t in args.inflexion.split(",")]
    if args.formal:
        cfg.formal = True
    if args.map:
        cfg.map = _read_json_or_text(args.map)
    if args.workers:
        cfg.workers = args.workers
    if not isinstance(cfg.points, list):
        raise InputError("points must be a JSON list of 3-element arrays")
    return cfg


# --------------------------------------------------------------------------
# job pieces


def _field(cfg):
    return Field.parse(str(cfg.field))


def _curve(cfg, K):
    if cfg.curve is None:
        raise InputError("no curve given")
    return CubicCurve.from_json(cfg.curve, K)


def _points(cfg, K):
    return [PlanePoint.from_json(p, K) for p in cfg.points]


def _word_points(cfg, pts):
    word = cfg.word if cfg.word is not None else list(range(len(pts)))
    for i in word:
        if not 0 <= i < len(pts):
            raise InputError(f"word letter {i} is not a point position")
    return [pts[i] for i in word]


def _map_summary(phi, C):
    out = {"map": phi.to_json(), "formula": str(phi), "degree": phi.degree,
           "fixes_curve": maps.fixes_curve(phi, C)}
    return out


def cmd_curve_check(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    return {"curve": C.to_json(), "equation": str(C.F), "smooth": True, "certificate": C.certificate}


def cmd_sigma(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    pts = _points(cfg, K)
    if len(pts) != 1:
        raise InputError("sigma takes exactly one point")
    phi = maps.sigma(C, pts[0])
    twice = maps.map_compose(phi, phi)
    out = _map_summary(phi, C)
    out["involution"] = twice == maps.RationalMap.identity(K)
    out["removed_content"] = str(twice.content)
    out["inflexion"] = C.is_inflexion(pts[0])
    return out


def cmd_compose(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    letters = _word_points(cfg, _points(cfg, K))
    phi = maps.sigma_word(C, letters)
    out = _map_summary(phi, C)
    out["word"] = [p.to_json() for p in letters]
    return out


def _basepoint_block(phi, C):
    rep = maps.homaloidal_check(phi)
    dec = maps.decomposition_candidate_check(phi, C)
    return {"homaloidal": rep.to_json(), "violations": [r.to_json() for r in dec.violations]}


def _target_map(cfg, K, C):
    if cfg.map is not None:
        return maps.RationalMap.from_json(cfg.map, K)
    return maps.sigma_word(C, _word_points(cfg, _points(cfg, K)))


def cmd_verify(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    phi = _target_map(cfg, K, C)
    out = _map_summary(phi, C)
    out["preserves_curve"] = maps.preserves_curve(phi, C)
    if out["fixes_curve"]:
        out["quotients"] = [str(q) for q in maps.degfix_quotients(phi, C)]
    out["ok"] = out["fixes_curve"]
    return out


def cmd_basepoints(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    phi = _target_map(cfg, K, C)
    out = {"degree": phi.degree, **_basepoint_block(phi, C)}
    out["ok"] = out["homaloidal"]["deficit"] == [0, 0] and not out["violations"]
    return out


def _marked(cfg):
    if cfg.abstract is not None:
        return MarkedPointSet.abstract(int(cfg.abstract), inflexion=tuple(cfg.inflexion))
    K = _field(cfg)
    C = _curve(cfg, K)
    return marked_set_build(C, _points(cfg, K), formal=bool(cfg.formal))


def cmd_certify(cfg):
    lat = picard.PicLattice(_marked(cfg))
    max_len = cfg.max_len if cfg.max_len is not None else 12
    cert = picard.certify_free_product(lat, max_len, workers=cfg.workers, raise_on_failure=False)
    out = cert.to_json()
    out["ok"] = cert.status == "certified"
    return out


def cmd_degree_crosscheck(cfg):
    K = _field(cfg)
    C = _curve(cfg, K)
    pts = _points(cfg, K)
    ms = marked_set_build(C, pts, formal=bool(cfg.formal))
    lat = picard.PicLattice(ms)
    max_len = cfg.max_len if cfg.max_len is not None else 3
    if cfg.word is not None:
        words = [tuple(cfg.word)]
    else:
        words = [w for n in range(1, max_len + 1) for w in itertools.product(range(len(pts)), repeat=n)
                 if all(a != b for a, b in zip(w, w[1:]))]
    gid = list(ms.generators)
    rows, ok = [], True
    for w in words:
        symbolic = maps.sigma_word(C, [pts[i] for i in w]).degree
        predicted = picard.predicted_degree(lat, [gid[i] for i in w])
        ok &= symbolic == predicted
        rows.append({"word": list(w), "symbolic": symbolic, "predicted": predicted})
    return {"orientation": picard.ORIENTATION, "words": rows, "ok": ok}


HANDLERS = {
    "curve-check": cmd_curve_check,
    "sigma": cmd_sigma,
    "compose": cmd_compose,
    "verify": cmd_verify,
    "basepoints": cmd_basepoints,
    "certify": cmd_certify,
    "degree-crosscheck": cmd_degree_crosscheck,
}


def _error_block(exc: CremonaError) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("witness", "factor", "determinant", "remainder", "word", "failures", "details"):
        v = getattr(exc, attr, None)
        if v is None:
            continue
        if hasattr(v, "to_json"):
            v = v.to_json()
        elif not isinstance(v, (list, int, str)):
            v = str(v)
        out[attr] = v
    return out


def run(cfg: JobConfig):
    """Execute a job; returns ``(exit_code, report)``."""
    report = {"command": cfg.command, "config_hash": cfg.config_hash}
    try:
        result = HANDLERS[cfg.command](cfg)
    except CremonaError as exc:
        report["status"] = "error"
        report["error"] = _error_block(exc)
        return exc.exit_code, report
    report["result"] = result
    ok = result.get("ok", True) and result.get("fixes_curve", True)
    report["status"] = "ok" if ok else "failed"
    return (0 if ok else 2), report


def make_parser():
    ap = argparse.ArgumentParser(prog="cremona-inertia", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON job file ('-' for stdin)")
    ap.add_argument("--field", help="Q or Fp:<prime>")
    ap.add_argument("--curve", help="file with the curve: 10 coefficients or an equation")
    ap.add_argument("--equation", help="the curve equation inline, e.g. 'y^2*z - x^3 + x*z^2'")
    ap.add_argument("--points", help="file with a JSON list of points")
    ap.add_argument("--point", action="append", help="inline point 'x,y,z' (repeatable)")
    ap.add_argument("--word", help="comma separated positions in the point list")
    ap.add_argument("--max-len", type=int, dest="max_len")
    ap.add_argument("--abstract", type=int, metavar="N", help="abstract marked set with N generators")
    ap.add_argument("--inflexion", help="abstract generators (0-based) given a near successor")
    ap.add_argument("--formal", action="store_true",
                    help="label tangency points that are not rational instead of failing")
    ap.add_argument("--map", help="file with a map object (verify, basepoints)")
    ap.add_argument("--workers", type=int, help="processes for certify")
    ap.add_argument("--out", help="also write the report here")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = build_config(args)
        code, report = run(cfg)
    except (CremonaError, OSError) as exc:
        code = getattr(exc, "exit_code", 4)
        report = {"command": args.command, "status": "error",
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(f"{args.command}: {report['status']} (exit {code}, {time.perf_counter() - t0:.2f}s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
