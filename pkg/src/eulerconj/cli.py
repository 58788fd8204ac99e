"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 oracle mismatch.
The environment variable ``ELASTICA_TOL`` overrides the default integration
tolerance; ``--tol`` overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from eulerconj.conjugate import (
    CenteredAt,
    conj_enumerate_centered,
    p1conj_fixed_z,
    t1conj,
    with_morse_index,
)
from eulerconj.elastica import classify_stability, emit_plot, inflection_counts, markers_for, sample_arc
from eulerconj.elliptic import complete_E, complete_K, find_k0, jacobi, jacobi_with_epsilon
from eulerconj.errors import (
    AmbiguousEndpointError,
    ConsistencyError,
    DomainError,
    IntegrationError,
    StratumError,
)
from eulerconj.oracle import (
    DEFAULT_TOL,
    STANDARD_SEED,
    crosscheck,
    random_n1_covectors,
    random_n2_covectors,
)
from eulerconj.roots import RootKind, find_kbar, root_table
from eulerconj.strata import Covector, Stratum, natural_period

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class Config:
    tol: float = DEFAULT_TOL
    seed: int = STANDARD_SEED
    output: Optional[Path] = None


def _config(args) -> Config:
    tol = args.tol
    if tol is None:
        env = os.environ.get("ELASTICA_TOL")
        try:
            tol = float(env) if env else DEFAULT_TOL
        except ValueError:
            raise UsageError(f"ELASTICA_TOL is not a number: {env!r}")
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    out = Path(args.output) if getattr(args, "output", None) else None
    return Config(tol=tol, seed=args.seed, output=out)


def _modulus(text: str) -> float:
    if text.lower() == "k0":
        return find_k0()
    if text.lower() == "kbar":
        return find_kbar()
    return float(text)


def _emit(text: str, cfg: Config) -> None:
    if cfg.output is not None:
        cfg.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj, cfg: Config) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", cfg)


def _add_covector_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stratum", default="N1", choices=[s.value for s in Stratum])
    p.add_argument("--k", type=_modulus, help="elliptic modulus (N1, N2plus, N2minus); 'k0' and 'kbar' accepted")
    p.add_argument("--phase", type=float, default=0.0,
                   help="phi (N1, N3), psi (N2), or the constant curvature (N6)")
    p.add_argument("--r", type=float, default=None, help="energy scale; default 1 (0 for N6)")


def _covector(args) -> Covector:
    stratum = Stratum(args.stratum)
    r = args.r if args.r is not None else (0.0 if stratum == Stratum.N6 else 1.0)
    k = args.k if stratum in (Stratum.N1, Stratum.N2plus, Stratum.N2minus) else None
    return Covector(stratum, k, args.phase, r)


# -- subcommands ------------------------------------------------------------

def cmd_elliptic(args, cfg: Config) -> int:
    out = {}
    if args.k0:
        k0 = find_k0()
        out["k0"] = k0
        out["K(k0)"] = float(complete_K(k0))
    if args.K is not None:
        out["K"] = float(complete_K(args.K))
    if args.E is not None:
        out["E"] = float(complete_E(args.E))
    wants = {name: getattr(args, name) for name in ("sn", "cn", "dn", "eps")}
    if any(v is not None for v in wants.values()):
        if args.k is None:
            raise UsageError("--sn/--cn/--dn/--eps need --k")
        for name, u in wants.items():
            if u is None:
                continue
            sn, cn, dn, eps = (float(v) for v in jacobi_with_epsilon(u, args.k))
            out[name] = {"sn": sn, "cn": cn, "dn": dn, "eps": eps}[name]
    if not out:
        raise UsageError("nothing to evaluate; see --help")
    _emit_json(out, cfg)
    return EXIT_OK


def cmd_roots(args, cfg: Config) -> int:
    if args.kbar:
        _emit_json({"kbar": find_kbar()}, cfg)
        return EXIT_OK
    if args.k is None or args.kind is None:
        raise UsageError("--kind and --k are required unless --kbar is given")
    table = root_table(RootKind(args.kind.upper()), args.k, args.n, args.n_min)
    _emit(table.to_csv(), cfg)
    return EXIT_OK


def cmd_conjugate(args, cfg: Config) -> int:
    if args.enumerate:
        if args.k is None or args.p_max is None:
            raise UsageError("--enumerate needs --k and --p-max")
        roots = conj_enumerate_centered(args.k, CenteredAt(args.enumerate.capitalize()), args.p_max)
        _emit_json({"k": args.k, "centered_at": args.enumerate.capitalize(), "p_max": args.p_max,
                    "roots": [{"p": r.p, "multiplicity": r.multiplicity, "families": list(r.families)}
                              for r in roots]}, cfg)
        return EXIT_OK
    lam = _covector(args)
    res = t1conj(lam)
    if args.morse is not None:
        res = with_morse_index(res, args.morse)
    _emit_json(res.to_json(), cfg)
    return EXIT_OK


def cmd_scan(args, cfg: Config) -> int:
    ks = args.k if args.k else list(np.linspace(args.k_min, args.k_max, args.nk))
    lines = ["k,tau,p1conj"]
    for k in ks:
        K = float(complete_K(k))
        for tau in np.linspace(0.0, K, args.ntau):
            sn = float(jacobi(tau, k).sn)
            z = min(sn * sn, 1.0)
            lines.append(f"{k!r},{float(tau)!r},{p1conj_fixed_z(k, z)!r}")
    _emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK


def _crosscheck_one(job):
    lam, t_max, tol = job
    return crosscheck(lam, t_max, tol=tol).to_json()


def cmd_crosscheck(args, cfg: Config) -> int:
    if args.standard:
        lams = random_n1_covectors(args.count, cfg.seed) if args.standard == "n1" else random_n2_covectors(
            args.count, cfg.seed)
    else:
        lams = [_covector(args)]
    for lam in lams:
        if lam.stratum not in (Stratum.N1, Stratum.N2plus, Stratum.N2minus):
            raise UsageError("crosscheck needs an N1 or N2 covector")
    jobs = [(lam, args.periods * natural_period(lam), cfg.tol) for lam in lams]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_crosscheck_one, jobs))
    else:
        reports = [_crosscheck_one(j) for j in jobs]
    ok = all(r["ok"] for r in reports)
    _emit_json({"ok": ok, "reports": reports}, cfg)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_classify(args, cfg: Config) -> int:
    lam = _covector(args)
    v = classify_stability(lam, args.t)
    interior, boundary = inflection_counts(lam, args.t)
    out = v.to_json()
    out.update({"verdict": v.status.slug, "covector": lam.to_dict(), "t": args.t,
                "inflections": {"interior": interior, "boundary": boundary}})
    _emit_json(out, cfg)
    return EXIT_OK


def cmd_plot(args, cfg: Config) -> int:
    lam = _covector(args)
    arc = sample_arc(lam, args.t, args.samples, cfg.tol)
    markers = markers_for(lam, args.t) if args.markers else []
    svg, csv_path = emit_plot(arc, markers, args.output)
    sys.stdout.write(json.dumps({"svg": str(svg), "csv": str(csv_path)}, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eulerconj", description="Conjugate points and stability of Euler elasticae.")
    parser.add_argument("--tol", type=float, default=None, help="integration tolerance (default 1e-12)")
    parser.add_argument("--seed", type=int, default=STANDARD_SEED, help="seed for generated test sets")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("elliptic", help="complete/incomplete integrals, Jacobi functions, k0")
    p.add_argument("--k0", action="store_true", help="print the modulus with 2E = K")
    p.add_argument("--K", type=float, metavar="k", help="complete integral of the first kind")
    p.add_argument("--E", type=float, metavar="k", help="complete integral of the second kind")
    for name in ("sn", "cn", "dn", "eps"):
        p.add_argument(f"--{name}", type=float, metavar="u")
    p.add_argument("--k", type=_modulus)
    p.add_argument("--output")
    p.set_defaults(func=cmd_elliptic)

    p = sub.add_parser("roots", help="root tables of f1, x1, x2 as CSV")
    p.add_argument("--kind", choices=["p1", "px1", "px2", "P1", "PX1", "PX2"])
    p.add_argument("--k", type=_modulus)
    p.add_argument("--n", type=int, default=4, help="largest root index")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--kbar", action="store_true", help="print the modulus where the first x1 root is 2K")
    p.add_argument("--output")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("conjugate", help="first conjugate time, Morse index, centered enumeration")
    _add_covector_args(p)
    p.add_argument("--morse", type=float, metavar="t", help="also count conjugate times in (0, t)")
    p.add_argument("--enumerate", choices=["vertex", "inflection"])
    p.add_argument("--p-max", type=float)
    p.add_argument("--output")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("scan", help="first conjugate p on a (k, tau) grid as CSV")
    p.add_argument("--k", type=_modulus, action="append", help="modulus (repeatable)")
    p.add_argument("--k-min", type=float, default=0.1)
    p.add_argument("--k-max", type=float, default=0.99)
    p.add_argument("--nk", type=int, default=10)
    p.add_argument("--ntau", type=int, default=11)
    p.add_argument("--output")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("crosscheck", help="closed form against finite differences")
    _add_covector_args(p)
    p.add_argument("--standard", choices=["n1", "n2"], help="use the seeded standard test set")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--periods", type=float, default=1.5, help="scan horizon in periods")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("classify", help="local optimality of the arc [0, t]")
    _add_covector_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("plot", help="SVG of the arc [0, t] and a CSV of its samples")
    _add_covector_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--no-markers", dest="markers", action="store_false")
    p.add_argument("--output", required=True, help="SVG path; the CSV goes next to it")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help, or a usage error already reported
        return int(e.code or 0)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (UsageError, DomainError, StratumError, AmbiguousEndpointError) as e:
        sys.stderr.write(f"eulerconj: {e}\n")
        return EXIT_USAGE
    except (IntegrationError, ConsistencyError, FloatingPointError) as e:
        sys.stderr.write(f"eulerconj: numerical failure: {e}\n")
        return EXIT_NUMERIC
    except OSError as e:
        sys.stderr.write(f"eulerconj: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
