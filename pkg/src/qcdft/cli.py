"""``qcdft`` command line: one experiment per invocation, CSV or JSON out."""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DEFAULT_TOL, accuracy, bench_scaling, compare_engines, energy_grid, exact_energy, mf_energy, sqp_histogram
from .circuit import parse_circuit, parse_grcs, serialize_circuit, validate
from .engines import engine_name, resolve, sqp_trajectory
from .generators import FAMILIES, CircuitFamily, gen_bv, random_secret
from .rdm import RdmInvariantError
from .statevector import MAX_QUBITS, ResourceError

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ---- output ------------------------------------------------------------------

def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True,
                             cwd=Path(__file__).resolve().parent, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return f"qcdft-{__version__}"
    return out.stdout.strip() or f"qcdft-{__version__}"


def _meta(args, **extra) -> dict:
    meta = {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "engine": getattr(args, "engine", None),
        "family": getattr(args, "family", None),
        "tolerance": getattr(args, "tol", None),
        "version": __version__,
        "git_describe": _git_describe(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra)
    return meta


def _emit(args, columns, rows, extra=None, meta=None):
    """Write ``rows`` as CSV (default) or JSON to ``--out`` or stdout."""
    rows = [list(r) for r in rows]
    if args.format == "json":
        doc = {"meta": _meta(args, **(meta or {})), "columns": list(columns), "rows": rows}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        text = buf.getvalue()
    _write(args, text)


def _write(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- argument helpers --------------------------------------------------------

def _int_list(s: str) -> list[int]:
    try:
        return [int(float(x)) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _float_list(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _positive(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _tol(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _secret(s: str):
    if s == "random":
        return None
    if not s or set(s) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"secret must be a bit string or 'random', got {s!r}")
    return tuple(int(b) for b in s)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QCDFT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QCDFT_SEED must be an integer, got {env!r}")


def _initial(s: str | None, n: int) -> int:
    """``--init`` as a basis index or a bit string (qubit 0 first)."""
    if s is None:
        return 0
    if s.startswith("b"):
        bits = s[1:]
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise UsageError(f"--init b<bits> needs {n} bits, got {bits!r}")
        return sum(1 << q for q, b in enumerate(bits) if b == "1")
    try:
        idx = int(s)
    except ValueError:
        raise UsageError(f"--init must be a basis index or b<bits>, got {s!r}")
    if not 0 <= idx < 2 ** n:
        raise UsageError(f"--init index {idx} outside 0..2^{n}-1")
    return idx


# ---- parser ------------------------------------------------------------------

def _common(p, out=True):
    g = p.add_argument_group("common")
    g.add_argument("--seed", type=int, default=None, help="RNG seed (fallback: $QCDFT_SEED, then 0)")
    g.add_argument("--threads", type=_positive, default=1, help="worker threads; results do not depend on it")
    if out:
        g.add_argument("--out", help="write here instead of stdout")
        g.add_argument("--format", choices=("csv", "json"), default="csv")


def _source(p, family_required=False):
    g = p.add_argument_group("circuit source")
    g.add_argument("--family", choices=FAMILIES, required=family_required)
    g.add_argument("--n", type=_positive, default=20, help="qubit count (default 20)")
    g.add_argument("--depth", type=_positive, default=20, help="steps for random families (default 20)")
    g.add_argument("--repeats", type=_positive, default=1, help="pattern repeats (nonrandom) or timing repeats (bench)")
    g.add_argument("--secret", type=_secret, default=None, help="bv secret: bit string or 'random'")
    g.add_argument("--register", type=_positive, default=None, help="bv register size (qubits = register + 1)")
    g.add_argument("--thetas", type=_float_list, default=None, help="rx angles a,b,...")
    if not family_required:
        g.add_argument("--circuit", help="native circuit file")
        g.add_argument("--grcs", help="GRCS-style circuit file")
        g.add_argument("--strip-h", action="store_true", help="drop H gates from a GRCS file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcdft", description="Mean-field SQP simulation of quantum circuits.")
    parser.add_argument("--version", action="version", version=f"qcdft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a generated circuit in native format")
    _source(p)
    _common(p)

    p = sub.add_parser("run", help="SQP trajectory of one circuit under one engine")
    _source(p)
    p.add_argument("--engine", default="lpa", help="lpa, mga3, mga2, mga6, mga:<file>, rdm or exact")
    p.add_argument("--init", default=None, help="initial basis state: index or b<bits> (qubit 0 first)")
    _common(p)

    p = sub.add_parser("compare", help="per-step SQP accuracy of engines against the exact oracle")
    _source(p, family_required=True)
    p.add_argument("--engines", default="lpa", help="comma-separated engine list")
    p.add_argument("--instances", type=_positive, default=20)
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    _common(p)

    p = sub.add_parser("bench", help="wall time on the nonrandom family versus size")
    p.add_argument("--engine", default="lpa", help="lpa, mga3 or rdm")
    p.add_argument("--sizes", type=_int_list, default=[10_000, 100_000, 1_000_000])
    p.add_argument("--repeats", type=_positive, default=3)
    _common(p)

    p = sub.add_parser("vqe", help="mean-field energy of the RX product ansatz")
    p.add_argument("--grid", type=_positive, default=None, help="scan a R x R grid over [0, 2pi)^2")
    p.add_argument("--thetas", type=_float_list, default=None, help="evaluate these angles instead")
    _common(p)

    p = sub.add_parser("bv", help="Bernstein-Vazirani secret recovery")
    p.add_argument("--register", type=_positive, default=None, help="register size (default 10, or the secret's length)")
    p.add_argument("--secret", type=_secret, default=None, help="bit string or 'random' (default)")
    p.add_argument("--engine", default="rdm")
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    _common(p)

    p = sub.add_parser("hist", help="histogram of final-step SQPs")
    _source(p)
    p.add_argument("--engine", default="lpa")
    _common(p)

    p = sub.add_parser("validate", help="check a circuit file; exit 2 if it has violations")
    g = p.add_argument_group("circuit source")
    g.add_argument("--circuit", help="native circuit file")
    g.add_argument("--grcs", help="GRCS-style circuit file")
    g.add_argument("--strip-h", action="store_true")
    _common(p)
    return parser


# ---- commands ----------------------------------------------------------------

def _load_circuit(args, seed):
    circuit_file = getattr(args, "circuit", None)
    grcs_file = getattr(args, "grcs", None)
    if circuit_file and grcs_file:
        raise UsageError("give at most one of --circuit and --grcs")
    if circuit_file:
        return parse_circuit(Path(circuit_file).read_text())
    if grcs_file:
        return parse_grcs(Path(grcs_file).read_text(), strip_h=args.strip_h)
    if getattr(args, "strip_h", False):
        raise UsageError("--strip-h needs --grcs")
    if args.family is None:
        raise UsageError("need --family, --circuit or --grcs")
    return _family(args).build(seed)


def _family(args) -> CircuitFamily:
    n = args.n
    thetas = ()
    if args.family == "bv":
        if args.register is not None:
            n = args.register + 1
        if args.secret is not None:
            if args.register is not None and len(args.secret) != args.register:
                raise UsageError(f"--secret has {len(args.secret)} bits, --register is {args.register}")
            n = len(args.secret) + 1
    elif args.family == "bell":
        n = 2
    elif args.family == "rx":
        if not args.thetas:
            raise UsageError("--family rx needs --thetas")
        thetas = tuple(args.thetas)
        n = len(thetas)
    return CircuitFamily(args.family, n=n, depth=args.depth, repeats=args.repeats,
                         secret=args.secret if args.family == "bv" else None, thetas=thetas)


def _check_engine_size(engine, n):
    if engine == "exact" and n > MAX_QUBITS:
        raise ResourceError(f"engine exact is limited to {MAX_QUBITS} qubits, circuit has {n}")


def cmd_gen(args):
    c = _load_circuit(args, _seed(args))
    if args.format == "json":
        _write(args, json.dumps({"meta": _meta(args), "circuit": serialize_circuit(c)}, indent=2) + "\n")
    else:
        _write(args, serialize_circuit(c))


def cmd_run(args):
    seed = _seed(args)
    c = _load_circuit(args, seed)
    engine = resolve(args.engine)
    _check_engine_size(engine, c.n_qubits)
    init = _initial(args.init, c.n_qubits)
    traj = sqp_trajectory(c, engine, initial=init)
    columns = ["step"] + [f"q{q}" for q in range(c.n_qubits)]
    rows = ([s] + [float(x) for x in row] for s, row in enumerate(traj))
    _emit(args, columns, rows, meta={"seed": seed, "engine": engine_name(engine), "initial": init})


def cmd_compare(args):
    seed = _seed(args)
    fam = _family(args)
    engines = [e for e in args.engines.split(",") if e.strip()]
    if not engines:
        raise UsageError("--engines is empty")
    reports = compare_engines(fam, engines, instances=args.instances, seed=seed, tol=args.tol,
                              threads=args.threads)
    rows = [(name, s, m, d) for name, rep in reports.items() for s, m, d in rep.rows()]
    _emit(args, ["engine", "step", "mean_accuracy", "std"], rows,
          meta={"seed": seed, "engine": list(reports), "instances": args.instances})


def cmd_bench(args):
    rows = bench_scaling(args.engine, args.sizes, repeats=args.repeats)
    _emit(args, ["size", "seconds"], rows)


def cmd_vqe(args):
    if (args.grid is None) == (args.thetas is None):
        raise UsageError("give exactly one of --grid and --thetas")
    if args.thetas is not None:
        _emit(args, ["n_qubits", "mf_energy", "exact_energy"],
              [(len(args.thetas), mf_energy(args.thetas), exact_energy(args.thetas))])
        return
    surface, minima = energy_grid(2, args.grid)
    for t1, t2, e in minima:
        print(f"minimum: theta1={t1:.6f} theta2={t2:.6f} E={e:.12f}", file=sys.stderr)
    _emit(args, ["theta1", "theta2", "energy"], surface.rows(),
          extra={"minima": [list(m) for m in minima]})


def cmd_bv(args):
    seed = _seed(args)
    if args.secret is None:
        secret = random_secret(args.register or 10, seed)
    else:
        if args.register is not None and len(args.secret) != args.register:
            raise UsageError(f"--secret has {len(args.secret)} bits, --register is {args.register}")
        secret = np.asarray(args.secret, dtype=np.int8)
    register = len(secret)
    c = gen_bv(register, secret)
    engine = resolve(args.engine)
    _check_engine_size(engine, c.n_qubits)
    p = sqp_trajectory(c, engine, record=False)[:register]
    acc = accuracy(p, secret, args.tol)
    recovered = "".join("1" if x > 0.5 else "0" if x < 0.5 else "?" for x in p)
    secret_str = "".join(map(str, secret))
    print(f"accuracy={acc} recovered={'yes' if recovered == secret_str else 'no'}", file=sys.stderr)
    _emit(args, ["register_size", "engine", "accuracy", "secret", "recovered"],
          [(register, engine_name(engine), acc, secret_str, recovered)],
          meta={"seed": seed, "engine": engine_name(engine)})


def cmd_hist(args):
    seed = _seed(args)
    c = _load_circuit(args, seed)
    engine = resolve(args.engine)
    _check_engine_size(engine, c.n_qubits)
    p = sqp_trajectory(c, engine, record=False)
    edges = np.linspace(0.0, 1.0, 102)
    props = sqp_histogram(p, edges)
    _emit(args, ["bin_left", "bin_right", "proportion"],
          zip(edges[:-1].tolist(), edges[1:].tolist(), props.tolist()),
          meta={"seed": seed, "engine": engine_name(engine)})


def cmd_validate(args):
    if not (args.circuit or args.grcs):
        raise UsageError("need --circuit or --grcs")
    c = _load_circuit(args, 0)
    violations = validate(c)
    _emit(args, ["step", "qubits", "message"],
          [(v.step, " ".join(map(str, v.qubits)), v.message) for v in violations])
    if violations:
        print(f"{len(violations)} violation(s)", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen, "run": cmd_run, "compare": cmd_compare, "bench": cmd_bench,
    "vqe": cmd_vqe, "bv": cmd_bv, "hist": cmd_hist, "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args) or EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ValueError, KeyError, OSError, ResourceError, RdmInvariantError) as exc:
        # CircuitSyntaxError and InvalidCircuit are ValueErrors
        print(f"qcdft: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
