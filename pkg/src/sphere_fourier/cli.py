"""Command-line front end.

    sphere-fourier verify --n 2 --kmax 4 --rho 1,2 --res 32
    sphere-fourier funk --n 2 --j 1
    sphere-fourier dims --n 2 --kmax 3 --format csv

Integer options accept ``3``, ``1,2,5`` or inclusive ranges ``1..3``.
Exit status: 0 when every comparison passes, 1 on any failure, 2 on usage
errors.  Diagnostic discrepancies are reported but never change the status.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from . import __version__, kernels
from . import harmonics as H
from . import transforms as T
from .sphere import random_points, random_rotation

COMMANDS = ("eval", "oracle", "verify", "constants", "funk", "dims", "phi")

CSV_HEADER = [
    "label", "n", "k", "m", "j", "rho", "point",
    "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_err", "rel_err", "tol", "grid_res", "method", "verdict", "note",
]


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty element in {text!r}")
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def parse_float_list(text: str) -> list:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad real list {text!r}") from exc


@dataclass
class RunConfig:
    command: str
    n: Optional[list] = None
    k: Optional[list] = None
    kmax: Optional[int] = None
    m: Optional[list] = None
    j: Optional[list] = None
    rho: Optional[list] = None
    res: Optional[int] = None
    tol: float = 1e-8
    format: str = "json"
    seed: int = 0
    points: int = 1
    rotations: int = 5
    out: Optional[str] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        for name in ("n", "k", "m", "j"):
            vals = getattr(self, name)
            if vals is not None and any(v < (1 if name in ("n", "m") else 0) for v in vals):
                raise UsageError(f"--{name} out of range: {vals}")
        if self.kmax is not None and self.kmax < 0:
            raise UsageError("--kmax must be >= 0")
        if self.res is not None and self.res < 2:
            raise UsageError("--res must be >= 2")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.points < 1 or self.rotations < 0:
            raise UsageError("--points must be >= 1 and --rotations >= 0")

    def degrees(self, default_max: int = 4) -> list:
        if self.k is not None:
            return list(self.k)
        return list(range(0, (self.kmax if self.kmax is not None else default_max) + 1))

    def dims(self, default=(2,)) -> list:
        return list(self.n) if self.n is not None else list(default)


def _row(report: Optional[T.ComparisonReport] = None, **fields) -> dict:
    row = {key: None for key in CSV_HEADER if not key.endswith(("_re", "_im"))}
    row.update(lhs=None, rhs=None)
    if report is not None:
        row.update(
            label=report.label, lhs=report.lhs, rhs=report.rhs, abs_err=report.abs_err, rel_err=report.rel_err,
            tol=report.tol, grid_res=report.grid_res, method=report.method, verdict=report.verdict, note=report.note,
        )
    row.update(fields)
    return row


def _points(n: int, cfg: RunConfig, count: Optional[int] = None) -> list:
    return random_points(n, count or cfg.points, seed=cfg.seed)


def _value_rows(cfg: RunConfig, oracle: bool) -> list:
    if cfg.n is None or (cfg.k is None and cfg.kmax is None):
        raise UsageError(f"{cfg.command} needs --n and one of --k, --kmax")
    rows = []
    rhos = cfg.rho or [1.0]
    res = cfg.res or 32
    for n in cfg.n:
        pts = _points(n, cfg)
        for k in cfg.degrees():
            basis = H.HarmonicBasis(n, max(k, 1))
            ms = cfg.m or list(range(1, basis.dim(k) + 1))
            if any(m > basis.dim(k) for m in ms):
                raise UsageError(f"--m exceeds dimension {basis.dim(k)} for k={k}, n={n}")
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", T.ResolutionWarning)
                if oracle:
                    vals = T.oracle_I_batch(basis, k, pts, rhos, res)
                else:
                    vals = T.closed_form_I_batch(basis, k, pts, rhos)
            note = "; ".join(str(w.message) for w in caught)
            for m in ms:
                for ip, p in enumerate(pts):
                    for ir, rho in enumerate(rhos):
                        rows.append(_row(
                            label="oracle_I" if oracle else "closed_form_I", n=n, k=k, m=m, rho=rho,
                            point=[float(v) for v in p.cart], lhs=complex(vals[m - 1, ip, ir]),
                            grid_res=res if oracle else None,
                            method="product-quadrature" if oracle else "funk-hecke-closed-form",
                            verdict="computed", note=note,
                        ))
    return rows


def _verify_rows(cfg: RunConfig) -> list:
    rows = []
    rhos = cfg.rho or [0.5, 1.0, 2.0, 5.0]
    res = cfg.res or 32
    count = cfg.points if cfg.points > 1 else 20
    for n in cfg.dims((1, 2, 3)):
        pts = _points(n, cfg, count)
        for k in cfg.degrees(4):
            basis = H.HarmonicBasis(n, max(k, 1))
            closed = T.closed_form_I_batch(basis, k, pts, rhos)
            both = np.concatenate([np.asarray(rhos), -np.asarray(rhos)])
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", T.ResolutionWarning)
                orc = T.oracle_I_batch(basis, k, pts, both, res)
            note = "; ".join(str(w.message) for w in caught)
            R = len(rhos)
            for m in range(basis.dim(k)):
                for ip, p in enumerate(pts):
                    pc = [float(v) for v in p.cart]
                    for ir, rho in enumerate(rhos):
                        rep = T.compare("theorem", closed[m, ip, ir], orc[m, ip, ir], cfg.tol,
                                        criterion="mixed", grid_res=res, method="closed-form-vs-quadrature")
                        rows.append(_row(rep, n=n, k=k, m=m + 1, rho=rho, point=pc, note=note))
                        sign = T.compare("sign-law", orc[m, ip, R + ir], (-1) ** k * orc[m, ip, ir], max(cfg.tol, 1e-9),
                                         criterion="mixed", grid_res=res, method="quadrature")
                        rows.append(_row(sign, n=n, k=k, m=m + 1, rho=rho, point=pc, note=note))
    return rows


def _constants_rows(cfg: RunConfig) -> list:
    rows = []
    for n in cfg.dims((1, 2, 3)):
        for k in cfg.degrees(4):
            basis = H.HarmonicBasis(n, max(k, 1))
            c = T.closed_form_coefficient(k, n)
            recs = T.per_m_coefficients(basis, k, res=cfg.res)
            for rec in recs:
                rep = T.compare("c-extraction", rec.value, c, cfg.tol, grid_res=rec.grid_res,
                                method="quadrature-extraction-vs-funk-hecke-integral")
                rows.append(_row(rep, n=n, k=k, m=rec.m, rho=rec.reference_rho))
            if k % 2 == 0:
                literal = T.paper_even_coefficient(k // 2, n)
                rep = T.compare("c-even-literal", literal, recs[0].value, cfg.tol, diagnostic=n >= 3,
                                grid_res=recs[0].grid_res, method="paper-formula-vs-quadrature-extraction",
                                note="literal eigenvalue does not hold for n >= 3" if n >= 3 else "")
                rows.append(_row(rep, n=n, k=k, j=k // 2, rho=recs[0].reference_rho))
    return rows


def _funk_rows(cfg: RunConfig) -> list:
    rows = []
    res = cfg.res or 64
    js = cfg.j if cfg.j is not None else [0, 1, 2]
    for n in cfg.dims((2,)):
        for j in js:
            num = T.funk_eigenvalue_numeric(j, n, res)
            literal = T.paper_funk_eigenvalue(j, n)
            rep = T.compare("funk-eigenvalue", num, literal, max(cfg.tol, 1e-7), diagnostic=n >= 3, grid_res=res,
                            method="subsphere-quadrature-vs-paper-formula",
                            note="literal formula omits the subsphere surface measure" if n >= 3 else "")
            rows.append(_row(rep, n=n, j=j, k=2 * j))
            basis = H.HarmonicBasis(n, max(2 * j, 1))
            extracted = T.per_m_coefficients(basis, 2 * j)[0]
            rel = T.compare("eigenvalue-relation", T.even_coefficient_from_eigenvalue(j, n, num), extracted.value,
                            max(cfg.tol, 1e-7), grid_res=res, method="relation-with-numeric-eigenvalue")
            rows.append(_row(rel, n=n, j=j, k=2 * j, rho=extracted.reference_rho))
    return rows


def _dims_rows(cfg: RunConfig) -> list:
    rows = []
    for n in cfg.dims((2,)):
        for k in cfg.degrees(3):
            d = H.harmonic_space_dim(k, n)
            oracle = H.harmonic_dim_bruteforce(k, n)
            printed = H.harmonic_space_dim_printed(k, n)
            rep = T.compare("dimension", d, oracle, 0.5, criterion="abs", method="subtraction-formula-vs-rank-oracle",
                            note="" if printed == d else f"plus-sign formula gives {printed}")
            rows.append(_row(rep, n=n, k=k))
    return rows


def _phi_rows(cfg: RunConfig) -> list:
    rows = []
    for n in cfg.dims((2,)):
        for k in cfg.degrees(4):
            basis = H.HarmonicBasis(n, max(k, 1))
            summed, double = T.phi_sum(k, n, basis, res=cfg.res)
            rows.append(_row(T.compare("phi", summed.value, double.value, cfg.tol, grid_res=summed.grid_res,
                                       method="coefficient-sum-vs-double-integral"),
                             n=n, k=k, rho=summed.reference_rho))
            for r in range(cfg.rotations):
                rb = H.rotate_basis(basis, random_rotation(n + 1, seed=cfg.seed + r))
                s_rot, _ = T.phi_sum(k, n, rb, res=cfg.res)
                rows.append(_row(T.compare("phi-rotated", s_rot.value, summed.value, max(cfg.tol / 10, 1e-12),
                                           grid_res=s_rot.grid_res, method=f"rotation-seed-{cfg.seed + r}"),
                                 n=n, k=k, rho=s_rot.reference_rho))
    return rows


def compute(cfg: RunConfig) -> list:
    cfg.validate()
    return {
        "eval": lambda c: _value_rows(c, oracle=False),
        "oracle": lambda c: _value_rows(c, oracle=True),
        "verify": _verify_rows,
        "constants": _constants_rows,
        "funk": _funk_rows,
        "dims": _dims_rows,
        "phi": _phi_rows,
    }[cfg.command](cfg)


def _cplx(z):
    if z is None:
        return None
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _json_row(row: dict) -> dict:
    out = {}
    for key, val in row.items():
        if key in ("lhs", "rhs"):
            out[key] = _cplx(val)
        elif isinstance(val, (np.floating, np.integer)):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("out")
    return d


def to_json(cfg: RunConfig, rows: list) -> str:
    results = [_json_row(r) for r in rows]
    config = _config_dict(cfg)
    digest = hashlib.sha256(
        json.dumps({"config": config, "results": results}, sort_keys=True, allow_nan=False).encode()
    ).hexdigest()
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(epoch) if epoch else None))
    meta = {"version": __version__, "backend": kernels.BACKEND, "config": config,
            "content_hash": digest, "timestamp": stamp}
    return json.dumps({"meta": meta, "results": results}, indent=2, allow_nan=False) + "\n"


def _fmt(val) -> str:
    if val is None:
        return ""
    if isinstance(val, float):
        return repr(val)
    if isinstance(val, list):
        return " ".join(repr(float(v)) for v in val)
    return str(val)


def to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        lhs = complex(r["lhs"]) if r.get("lhs") is not None else None
        rhs = complex(r["rhs"]) if r.get("rhs") is not None else None
        flat = dict(r)
        flat["lhs_re"], flat["lhs_im"] = (lhs.real, lhs.imag) if lhs is not None else (None, None)
        flat["rhs_re"], flat["rhs_im"] = (rhs.real, rhs.imag) if rhs is not None else (None, None)
        w.writerow([_fmt(flat.get(key)) for key in CSV_HEADER])
    return buf.getvalue()


def exit_code(rows: list) -> int:
    return 1 if any(r.get("verdict") == "fail" for r in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphere-fourier", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "eval": "closed-form I_k^m(p, rho) at seeded points",
        "oracle": "quadrature I_k^m(p, rho) at seeded points",
        "verify": "closed form vs quadrature sweep, plus the sign law",
        "constants": "c(k, n) by projection vs Funk-Hecke, and the even-k formula",
        "funk": "Funk transform eigenvalues, numeric vs literal formula",
        "dims": "harmonic space dimensions vs a rank oracle",
        "phi": "sum of constants over a degree, two routes and under rotations",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--n", type=parse_int_list)
        sp.add_argument("--k", type=parse_int_list)
        sp.add_argument("--kmax", type=int)
        sp.add_argument("--m", type=parse_int_list)
        sp.add_argument("--j", type=parse_int_list)
        sp.add_argument("--rho", type=parse_float_list)
        sp.add_argument("--res", type=int)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--points", type=int, default=1, help="number of seeded evaluation points")
        sp.add_argument("--rotations", type=int, default=5, help="random rotations for phi")
        sp.add_argument("--out", help="output file (default stdout)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"sphere-fourier: error: {exc}", file=sys.stderr)
        return 2
    cfg = RunConfig(**vars(ns))
    try:
        rows = compute(cfg)
    except UsageError as exc:
        print(f"sphere-fourier: error: {exc}", file=sys.stderr)
        return 2
    text = to_json(cfg, rows) if cfg.format == "json" else to_csv(rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code(rows)


if __name__ == "__main__":
    sys.exit(main())
