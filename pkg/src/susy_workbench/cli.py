"""``workbench`` command-line front end.

Every subcommand reads its parameters from flags and, optionally, from a JSON
config file with top-level keys ``grid``, ``command``, ``params`` and
``output``. Flags override file values. Exit codes: 0 success, 1 check
failure, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys

from . import dirac as dq
from . import eigensolver as es
from . import planar as pl
from . import potentials as pt
from . import verify
from .errors import (ComplexIndex, ConfigError, ConvergenceFailure, Degenerate, GridTooCoarse,
                     NegativeEigenvalue, NonConfining, OutOfDomain, OutOfRange, SingularPoint)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("partners", "spectrum", "quasi", "planar", "verify-paper")
GRID_DEFAULTS = {"a": -12.0, "b": 12.0, "n_points": 3000, "m": 8}
PAIR_FAMILIES = {**pt.SUPERPOTENTIAL_FIELDS, "isochronous": ("z",)}
PLANAR_FIELDS = {"linear": ("lambda", "mu"), "isochronous": ("p", "q", "r"),
                 "isotonic": ("r", "s", "eta", "upsilon")}

_CONFIG_ERRORS = (ConfigError, ComplexIndex, Degenerate, NonConfining, OutOfDomain)
_NUMERIC_ERRORS = (ConvergenceFailure, SingularPoint, NegativeEigenvalue, GridTooCoarse, OutOfRange)


def _g(v):
    return f"{float(v):.17g}"


# ------------------------------------------------------------ config merge

def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(cfg) - {"grid", "command", "params", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level config key(s) {sorted(unknown)}")
    return cfg


def resolve_grid(file_grid, args):
    """Grid settings after flag overrides, validated."""
    grid = {**GRID_DEFAULTS, **(file_grid or {})}
    unknown = set(grid) - set(GRID_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown grid key(s) {sorted(unknown)}")
    for key in GRID_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            grid[key] = val
    try:
        grid["a"], grid["b"] = float(grid["a"]), float(grid["b"])
        n, m = grid["n_points"], grid["m"]
        if int(n) != n or int(m) != m:
            raise ValueError
        grid["n_points"], grid["m"] = int(n), int(m)
    except (TypeError, ValueError):
        raise ConfigError(f"grid values must be numbers and integer counts: {grid}") from None
    if not grid["b"] > grid["a"]:
        raise ConfigError(f"grid needs b > a, got a={grid['a']}, b={grid['b']}")
    if grid["n_points"] < 16:
        raise ConfigError(f"grid n_points must be at least 16, got {grid['n_points']}")
    if not 1 <= grid["m"] <= grid["n_points"]:
        raise ConfigError(f"m must lie in [1, n_points], got {grid['m']}")
    return grid


def merge_params(file_params, args, keys):
    params = dict(file_params or {})
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return params


def _spec(value, families, label):
    """A family spec from a ``family:...`` string or an already-built dict."""
    if isinstance(value, dict):
        return value
    if isinstance(value, str):
        return pt.parse_family_string(value, families)
    raise ConfigError(f"{label} must be a family string or a JSON spec, got {value!r}")


def _number(params, key, default):
    val = params.get(key, default)
    try:
        return float(val)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} must be a number, got {val!r}") from None


def _superpotential(value, label="W"):
    return pt.superpotential_from_json(_spec(value, pt.SUPERPOTENTIAL_FIELDS, label))


def _scalar(value):
    """``const:s0`` or any superpotential family string for the scalar potential S."""
    if isinstance(value, (int, float)):
        return dq.constant(value)
    if isinstance(value, dict) and "const" in value:
        return dq.constant(_number(value, "const", 0.0))
    if isinstance(value, str) and value.split(":", 1)[0].strip() == "const":
        spec = pt.parse_family_string(value, {"const": ("s0",)})
        return dq.constant(spec["params"].get("s0", 0.0))
    return _superpotential(value, "S")


# --------------------------------------------------------------- commands

def cmd_partners(params, grid):
    w = _superpotential(params.get("w", "linear:1,0"), "w")
    pair = pt.partner_potentials(w, _number(params, "lambda", 0.0))
    g = es.grid_for_domain(pair.domain, grid["n_points"], grid["a"], grid["b"])
    x = g.x
    vp, vm = pair.sample(x)
    buf = io.StringIO()
    buf.write("x,v_plus,v_minus\n")
    for row in zip(x, vp, vm):
        buf.write(",".join(_g(v) for v in row) + "\n")
    buf.write(f"# domain: {pair.domain.kind} [{_g(g.a)}, {_g(g.b)}] (numerical-oracle)\n")
    return buf.getvalue(), EXIT_OK


def _potential_object(value):
    spec = _spec(value, pt.POTENTIAL_FIELDS, "potential")
    return pt.potential_from_json(spec)


def _pair_object(value):
    spec = _spec(value, PAIR_FAMILIES, "pair")
    if spec["family"] == "isochronous":
        if "z" not in spec.get("params", {}):
            raise ConfigError("pair 'isochronous' needs field 'z'")
        return pt.isochronous_pair(spec["params"]["z"])
    return pt.partner_potentials(pt.superpotential_from_json(spec))


def _spacing_line(spec):
    if len(spec) < 2:
        return ""
    gaps = es.level_spacing(spec)
    return "# level spacing: " + ", ".join(f"{v:.10g}" for v in gaps) + " (numerical-oracle)\n"


def cmd_spectrum(params, grid):
    m, n = grid["m"], grid["n_points"]
    if ("potential" in params) == ("pair" in params):
        raise ConfigError("spectrum needs exactly one of 'potential' or 'pair'")
    if "potential" in params:
        pot = _potential_object(params["potential"])
        spec = es.solve_on_domain(pot, pot.domain(), m, n, grid["a"], grid["b"])
        return es.spectrum_to_csv(spec) + _spacing_line(spec), EXIT_OK

    pair = _pair_object(params["pair"])
    member = params.get("member", "plus")
    if member not in ("plus", "minus"):
        raise ConfigError(f"member must be 'plus' or 'minus', got {member!r}")
    tol = _number(params, "tol", 1e-2)
    check = bool(params.get("check_pairing", False))
    if check:
        plus, minus = es.solve_many([
            lambda: es.solve_on_domain(pair.v_plus, pair.domain, m, n, grid["a"], grid["b"]),
            lambda: es.solve_on_domain(pair.v_minus, pair.domain, m, n, grid["a"], grid["b"]),
        ])
    else:
        v = pair.v_plus if member == "plus" else pair.v_minus
        plus = minus = es.solve_on_domain(v, pair.domain, m, n, grid["a"], grid["b"])
    spec = plus if member == "plus" else minus
    text = es.spectrum_to_csv(spec) + _spacing_line(spec)
    code = EXIT_OK
    if check:
        rep = es.susy_pairing_check(plus, minus, tol)
        text += "".join(f"# {ln} (numerical-oracle)\n" for ln in rep.lines())
        code = EXIT_OK if rep.paired else EXIT_CHECK
    return text, code


def _dirac_params(params):
    s = _scalar(params["S"]) if "S" in params else dq.constant(0.0)
    w = _superpotential(params.get("W", "linear:1,0"))
    m = _number(params, "m0c2", 1.0)
    g = _number(params, "gamma", 0.0)
    d = params.get("delta", 0.0)
    if d == "perfect_square":
        d = g * g + m * m
    try:
        d = float(d)
    except (TypeError, ValueError):
        raise ConfigError(f"delta must be a number or 'perfect_square', got {d!r}") from None
    return dq.DiracParams(s, w, m, g, d)


def _domain_grid(w, grid, n=None):
    return es.grid_for_domain(w.domain(), n or grid["n_points"], grid["a"], grid["b"])


def _quasi_report(q, params_obj, g):
    """Report entries shared by the quasi and planar commands."""
    out = {"offdiagonal_residual": dq.offdiagonal_residual(q, g),
           "hermiticity_defect": dq.hermiticity_defect(q, g.x)}
    if params_obj is not None:
        out["k_vs_polynomial_residual"] = dq.quasi_matrix_residual(params_obj, g)
    return out


def cmd_quasi(params, grid, as_json=False):
    p = _dirac_params(params)
    g = _domain_grid(p.pseudo_w, grid)
    q = dq.quasi_elements(p)
    rep = _quasi_report(q, p, g)
    code = EXIT_OK
    conv = None
    if params.get("convergence"):
        ns = tuple(int(v) for v in params.get("ns", (200, 400, 800)))
        if len(ns) < 2 or min(ns) < 16:
            raise ConfigError(f"convergence needs at least two grid sizes >= 16, got {ns}")
        base = _domain_grid(p.pseudo_w, grid, ns[0])
        hs, res, order = dq.quasi_convergence(p, base.a, base.b, ns)
        conv = {"n_points": list(ns), "h": hs.tolist(), "residual": res.tolist(), "order": order}
        if not order >= 1.9:
            code = EXIT_CHECK
    if as_json:
        out = {"params": p.to_json(), "grid": {"a": g.a, "b": g.b, "n_points": g.n_points}, **rep}
        if conv:
            out["convergence"] = conv
        return json.dumps(out, indent=2, sort_keys=True) + "\n", code
    lines = [f"offdiagonal-residual: {_g(rep['offdiagonal_residual'])} (printed-formula)",
             f"hermiticity-defect: {_g(rep['hermiticity_defect'])} (printed-formula)",
             f"k-vs-polynomial-residual: {_g(rep['k_vs_polynomial_residual'])} "
             f"at n_points={g.n_points} (numerical-oracle)"]
    if conv:
        lines.append("n_points,h,residual")
        lines += [f"{n},{_g(h)},{_g(r)}" for n, h, r in zip(conv["n_points"], conv["h"], conv["residual"])]
        lines.append(f"fitted-order: {conv['order']:.6f} (expected >= 1.9) (numerical-oracle)")
    return "\n".join(lines) + "\n", code


def _vector_potential(params):
    a = params.get("A", "linear:1,0")
    allow = bool(params.get("allow_nonpositive", False))
    if isinstance(a, str):
        spec = pt.parse_family_string(a, PLANAR_FIELDS)
        return pl.VectorPotential(spec["family"], spec["params"], allow)
    if isinstance(a, dict):
        a = {**a, "allow_nonpositive": a.get("allow_nonpositive", allow)}
        return pl.VectorPotential.from_json(a)
    raise ConfigError(f"A must be a family string or a JSON spec, got {a!r}")


def cmd_planar(params, grid):
    a = _vector_potential(params)
    cfg = pl.PlanarConfig(a, _number(params, "k", 0.0), _number(params, "S0", 0.0),
                          _number(params, "gamma", 0.0), _number(params, "delta", 0.0),
                          _number(params, "vF", 1.0))
    red = pl.reduce_planar(a, cfg.wavenumber_k)
    if not red.has_discrete_spectrum:
        raise NonConfining("the effective superpotential does not confine; no discrete spectrum")
    m, n = grid["m"], grid["n_points"]
    dom = red.pair.domain
    v_up, v_dn = red.pair.v_minus, red.pair.v_plus   # planar V^+, V^-
    spec_up, spec_dn = es.solve_many([
        lambda: es.solve_on_domain(v_up, dom, m, n, grid["a"], grid["b"]),
        lambda: es.solve_on_domain(v_dn, dom, m, n, grid["a"], grid["b"]),
    ])
    v = cfg.fermi_velocity
    buf = io.StringIO()
    buf.write("member,n,eigenvalue,residual,dirac_energy\n")
    for label, spec in (("V+", spec_up), ("V-", spec_dn)):
        # (H_P)^2 = v^2 (-d^2 + V) + S0^2 on each component when S0 is constant
        energies = pl.dirac_energies(spec.eigenvalues + (cfg.s0 / v) ** 2, v)
        for k, (ev, res, en) in enumerate(zip(spec.eigenvalues, spec.residuals, energies)):
            buf.write(f"{label},{k},{_g(ev)},{_g(res)},{_g(en)}\n")
    # the pairing check compares SUSY labels: v_plus is planar V^-
    rep = es.susy_pairing_check(spec_dn, spec_up, _number(params, "tol", 1e-2))
    g = _domain_grid(red.w_eff, grid)
    quasi = _quasi_report(pl.planar_quasi_elements(cfg), None, g)
    buf.write(f"# offdiagonal-residual: {_g(quasi['offdiagonal_residual'])} (printed-formula)\n")
    side = pl.zero_mode_side(red.w_eff, g)
    planar_side = {"plus": "V-", "minus": "V+"}.get(side, "none")
    buf.write(f"# zero mode member: {planar_side} (numerical-oracle)\n")
    buf.writelines(f"# {ln} (numerical-oracle)\n" for ln in rep.lines())
    code = EXIT_OK
    if params.get("check_pairing") and not rep.paired:
        code = EXIT_CHECK
    return buf.getvalue(), code


def cmd_verify_paper(params, as_json=False):
    only = params.get("only")
    if isinstance(only, str):
        only = [s.strip() for s in only.split(",") if s.strip()]
    try:
        report = verify.run_suite(only=only or None)
    except ValueError as exc:
        if isinstance(exc, _NUMERIC_ERRORS):
            raise
        raise ConfigError(str(exc)) from None
    text = report.to_json() + "\n" if as_json else "\n".join(report.lines()) + "\n"
    return text, EXIT_OK if report.passed else EXIT_CHECK


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="workbench",
        description="Supersymmetric partner Hamiltonians, quasi Dirac operators and spectral checks.",
        epilog=("Grid defaults: a=-12, b=12 (a half-line domain starts just right of its pole), "
                "n_points=3000, m=8 levels. These converge every built-in verification at desk scale. "
                "Exit codes: 0 ok, 1 check failed, 2 config error, 3 numerical failure."))
    p.add_argument("--config", help="JSON file with keys grid, command, params, output")
    sub = p.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")

    def common(sp):
        sp.add_argument("--a", type=float, help="left end of the box (default -12)")
        sp.add_argument("--b", type=float, help="right end of the box (default 12)")
        sp.add_argument("--n-points", dest="n_points", type=int, help="interior grid nodes (default 3000)")
        sp.add_argument("--m", type=int, help="number of levels (default 8)")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = sub.add_parser("partners", help="sample V+ and V- of a superpotential")
    sp.add_argument("--w", help="superpotential, e.g. linear:1,0 or linear_inverse:k=0,l=1,z=-1,t=0")
    sp.add_argument("--lambda", dest="lambda", type=float, help="constant added to both partners")
    common(sp)

    sp = sub.add_parser("spectrum", help="lowest levels of a potential or of one member of a pair")
    sp.add_argument("--potential", help="ho[:omega], urabe:zeta,omega or isotonic_potential:omega_cap,eta")
    sp.add_argument("--pair", help="superpotential family string or isochronous:z=<value>")
    sp.add_argument("--member", choices=("plus", "minus"), help="pair member written as CSV (default plus)")
    sp.add_argument("--check-pairing", dest="check_pairing", action="store_const", const=True,
                    help="solve both members and append the SUSY pairing report")
    sp.add_argument("--tol", type=float, help="pairing tolerance (default 1e-2)")
    common(sp)

    sp = sub.add_parser("quasi", help="quasi-Hamiltonian block report")
    sp.add_argument("--S", dest="S", help="scalar potential: const:<s0> or a superpotential family string")
    sp.add_argument("--w", dest="W", help="pseudoscalar potential W (default linear:1,0)")
    sp.add_argument("--m0c2", type=float, help="rest-mass energy (default 1)")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--delta", help="number or 'perfect_square'")
    sp.add_argument("--convergence", action="store_const", const=True,
                    help="residual table over n_points 200, 400, 800 with fitted order")
    sp.add_argument("--json", action="store_true")
    common(sp)

    sp = sub.add_parser("planar", help="planar Dirac problem in a Landau-gauge field at fixed k")
    sp.add_argument("--A", dest="A", help="vector potential, e.g. linear:1,0 or isochronous:p,q,r")
    sp.add_argument("--k", type=float)
    sp.add_argument("--S0", dest="S0", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--vF", dest="vF", type=float)
    sp.add_argument("--allow-nonpositive", dest="allow_nonpositive", action="store_const", const=True)
    sp.add_argument("--check-pairing", dest="check_pairing", action="store_const", const=True)
    sp.add_argument("--tol", type=float)
    common(sp)

    sp = sub.add_parser("verify-paper", help="run the verification suite")
    sp.add_argument("--only", help="comma-separated check groups: " + ",".join(verify.GROUPS))
    sp.add_argument("--json", action="store_true")
    sp.add_argument("-o", "--output")
    return p


_PARAM_KEYS = {
    "partners": ("w", "lambda"),
    "spectrum": ("potential", "pair", "member", "check_pairing", "tol"),
    "quasi": ("S", "W", "m0c2", "gamma", "delta", "convergence"),
    "planar": ("A", "k", "S0", "gamma", "delta", "vF", "allow_nonpositive", "check_pairing", "tol"),
    "verify-paper": ("only",),
}


def _inject_command(argv):
    """Let the config file's ``command`` stand in for a missing subcommand."""
    if any(a in COMMANDS for a in argv):
        return argv
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    cfg = load_config(known.config)
    cmd = cfg.get("command")
    if cmd is None:
        return argv
    if cmd not in COMMANDS:
        raise ConfigError(f"config command must be one of {COMMANDS}, got {cmd!r}")
    # keep --config before the subcommand, everything else after it
    head, rest, i = [], [], 0
    while i < len(argv):
        if argv[i] == "--config":
            head += argv[i:i + 2]
            i += 2
            continue
        if argv[i].startswith("--config="):
            head.append(argv[i])
        else:
            rest.append(argv[i])
        i += 1
    return head + [cmd] + rest


def run(argv=None):
    """Parse, execute and return ``(text, exit_code)``; errors become exit codes."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_command(argv)
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        if args.command is None:
            raise ConfigError("no command given; choose one of " + ", ".join(COMMANDS))
        if cfg.get("command") not in (None, args.command):
            raise ConfigError(f"config command {cfg['command']!r} conflicts with {args.command!r}")
        params = merge_params(cfg.get("params"), args, _PARAM_KEYS[args.command])
        output = args.output if args.output is not None else cfg.get("output")
        as_json = bool(getattr(args, "json", False) or params.pop("json", False))
        if args.command == "verify-paper":
            text, code = cmd_verify_paper(params, as_json)
        else:
            grid = resolve_grid(cfg.get("grid"), args)
            if args.command == "partners":
                text, code = cmd_partners(params, grid)
            elif args.command == "spectrum":
                text, code = cmd_spectrum(params, grid)
            elif args.command == "quasi":
                text, code = cmd_quasi(params, grid, as_json)
            else:
                text, code = cmd_planar(params, grid)
    except _CONFIG_ERRORS as exc:
        return f"error: {exc}\n", EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        return f"numerical failure: {exc}\n", EXIT_NUMERIC
    if output:
        try:
            with open(output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            return f"error: cannot write {output!r}: {exc.strerror}\n", EXIT_CONFIG
        return "", code
    return text, code


def main(argv=None) -> int:
    try:
        text, code = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    stream = sys.stderr if code in (EXIT_CONFIG, EXIT_NUMERIC) else sys.stdout
    try:
        stream.write(text)
        stream.flush()
    except BrokenPipeError:  # e.g. piped into head
        sys.stdout = None
    return code


if __name__ == "__main__":
    sys.exit(main())
