"""Command line front end.

One executable, four subcommands:

* sft      exact expansive constants, Lebesgue numbers, entropy and decay
           rates for a subshift of finite type,
* torus    grid upper bounds and Lipschitz lower bounds for a hyperbolic
           toral automorphism,
* sampled  orbit-scan estimates for a finite sampled system,
* verify   the applicable inequality checks for any of the three;
           exit code 0 only when every check passes.

Reports are byte-stable: floats are printed to 12 significant digits, JSON
keys are sorted, and the manifest timestamp honors SOURCE_DATE_EPOCH. All
rates are natural-log; --log2 rescales the displayed rate and entropy
fields (verification records stay in natural log).
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import os
import shlex
import sys
from dataclasses import dataclass

from . import __version__, decay, sampled, symbolic, torus
from .decay import INF, GammaSequence

N_MAX_CAP = 64
GRID_CAP = 4096
POINTS_CAP = 100_000

_DEFAULT_N_MAX = {"sft": 24, "torus": 12, "sampled": 8}
_VERIFY_N_MAX = {"sft": 30, "torus": 12, "sampled": 8}


# -------------------------------------------------------------- manifest

@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    input_sha256: str
    command: str
    timestamp: str
    params: dict

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "input_sha256": self.input_sha256,
            "command": self.command,
            "timestamp": self.timestamp,
            "params": self.params,
        }


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time_now())
    dt = datetime.datetime.fromtimestamp(t, tz=datetime.timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def time_now() -> float:  # separated for tests
    import time

    return time.time()


# ------------------------------------------------------------- spec I/O

def _load_spec(arg: str) -> tuple[dict, str]:
    """Returns (parsed JSON, sha256 hex of the raw input bytes).

    The argument is inline JSON when it starts with a brace, a file path
    otherwise.
    """
    if arg.lstrip().startswith("{"):
        raw = arg.encode("utf-8")
    else:
        with open(arg, "rb") as fh:
            raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    return json.loads(raw.decode("utf-8")), digest


def parse_system_spec(doc: dict):
    """Dispatch a spec document on its schema: returns (type, object) with
    type one of "sft", "torus", "sampled"."""
    if not isinstance(doc, dict):
        raise ValueError("spec must be a JSON object")
    if "size" in doc and "entries" in doc:
        return "sft", symbolic.space_from_json(doc)
    if "dim" in doc and "matrix" in doc:
        return "torus", torus.torus_from_json(doc)
    if "points" in doc and "dist" in doc and "map" in doc:
        return "sampled", sampled.system_from_json(doc)
    raise ValueError(
        "unrecognized spec: expected size/entries (sft), dim/matrix (torus) "
        "or points/dist/map (sampled)"
    )


# ----------------------------------------------------------- formatting

def _jf(v: float):
    # +inf has no JSON encoding; the sentinel becomes a string
    return "inf" if v == INF else float(v)


def _seq_dict(seq: GammaSequence) -> dict:
    return {
        "kind": seq.kind,
        "source": seq.source,
        "entries": {str(n): _jf(v) for n, v in sorted(seq.entries.items())},
    }


def _decay_dict(d: decay.DecayEstimate, scale: float) -> dict:
    return {
        "hE_minus": d.hE_minus_est / scale,
        "hE_plus": d.hE_plus_est / scale,
        "slope": d.regression_slope / scale,
        "intercept": d.regression_intercept / scale,
        "window": [d.window[0], d.window[1]],
        "tail_fraction": d.tail_fraction,
        "kind": d.kind,
        "caveats": list(d.caveats),
    }


def _table_rows(seq: GammaSequence, scale: float) -> list[dict]:
    rows = []
    for n, v in sorted(seq.entries.items()):
        rate = None if v == INF else -math.log(v) / n / scale
        rows.append({"n": n, "gamma": _jf(v), "rate": rate})
    return rows


def _try_decay(seq: GammaSequence, tail: float, scale: float) -> dict:
    try:
        return _decay_dict(decay.decay_estimate(seq, tail), scale)
    except ValueError as exc:
        return {"error": str(exc)}


# ------------------------------------------------------------- commands

def _run_sft(space: symbolic.SymbolicSpace, params: dict) -> tuple[dict, int]:
    n_max = params["n_max"]
    tail = params["tail_fraction"]
    scale = params["scale"]
    ent = symbolic.entropy(space.matrix)
    dim = symbolic.hausdorff_dimension(space)
    gen = symbolic.generator_report(space.matrix)
    gseq = symbolic.gamma_sequence(space, n_max)
    dseq = symbolic.delta_sequence(space, n_max)
    exact = symbolic.exact_expansive_constant(space, n_max)
    verified = None
    if exact.witness is not None and exact.exponent is not None:
        verified = symbolic.verify_pair_witness(space, n_max, exact.witness,
                                                exact.exponent)
    result = {
        "system": {"type": "sft", **symbolic.space_to_json(space)},
        "matrix_report": {
            "valid": True,
            "irreducible": symbolic.validate_matrix(space.matrix).irreducible,
        },
        "entropy": {
            "value": ent.value / scale,
            "converged": ent.converged,
            "iterations": ent.iterations,
        },
        "hausdorff_dimension": dim,
        "generator": {"lower_bound": gen.lower_bound, "exact": gen.exact},
        "gamma": _seq_dict(gseq),
        "delta": _seq_dict(dseq),
        "gamma_decay": _try_decay(gseq, tail, scale),
        "delta_decay": _try_decay(dseq, tail, scale),
        "witness": {
            "n": n_max,
            "exponent": exact.exponent,
            "value": _jf(exact.value),
            "pair": symbolic.witness_to_json(exact.witness),
            "note": exact.note,
            "verified": verified,
        },
        "table": _table_rows(gseq, scale),
    }
    return result, 0


def _run_torus(t: torus.ToralAutomorphism, params: dict) -> tuple[dict, int]:
    n_max = params["n_max"]
    tail = params["tail_fraction"]
    scale = params["scale"]
    grids = params["grids"]
    gamma1, mode = params["gamma1"], params["gamma1_mode"]
    rep = torus.validate(t)
    ent = torus.entropy(t)
    finest = torus.RationalGrid(max(grids))
    upper, lower = torus.hE_bracket(t, n_max, finest, gamma1)
    per_grid = []
    uppers = {}
    for q in grids:
        if q == finest.Q:
            seq = upper
        else:
            seq = GammaSequence(
                entries={
                    n: torus.gamma_upper_bound(t, n, torus.RationalGrid(q))
                    for n in range(1, n_max + 1)
                },
                kind="upper",
                source=f"torus grid orbit bound, Q={q}",
            )
        uppers[q] = seq
        per_grid.append({"Q": q, "entries": _seq_dict(seq)["entries"]})
    violations = []
    checked = []
    for qa in grids:
        for qb in grids:
            if qb > qa and qb % qa == 0:
                checked.append([qa, qb])
                for n in range(1, n_max + 1):
                    ua, ub = uppers[qa].entries[n], uppers[qb].entries[n]
                    if ub > ua * (1.0 + 1e-12):
                        violations.append({"Q_coarse": qa, "Q_fine": qb, "n": n})
    result = {
        "system": {"type": "torus", **torus.torus_to_json(t)},
        "validation": {"det": rep.det, "eigen_moduli": list(rep.eigen_moduli)},
        "entropy": ent / scale,
        "gamma1": {"mode": mode, "value": gamma1},
        "grids": per_grid,
        "upper": _seq_dict(upper),
        "lower": _seq_dict(lower),
        "upper_decay": _try_decay(upper, tail, scale),
        "lower_decay": _try_decay(lower, tail, scale),
        "grid_refinement": {"checked_pairs": checked, "violations": violations},
        "table": _table_rows(upper, scale),
    }
    return result, 0 if not violations else 1


def _run_sampled(sys_: sampled.FiniteSampledSystem, doc: dict,
                 params: dict) -> tuple[dict, int]:
    n_max = params["n_max"]
    horizon = params["horizon"]
    tail = params["tail_fraction"]
    scale = params["scale"]
    gseq = sampled.gamma_estimate_sequence(sys_, n_max, horizon)
    result = {
        "system": {
            "type": "sampled",
            "points": sys_.point_count,
            "invertible": sys_.invertible,
        },
        "gamma": _seq_dict(gseq),
        "gamma_decay": _try_decay(gseq, tail, scale),
        "table": _table_rows(gseq, scale),
    }
    try:
        result["lipschitz"] = sampled.lipschitz_constant_estimate(sys_)
    except ValueError as exc:
        result["lipschitz"] = None
        result["lipschitz_note"] = str(exc)
    if "cover" in doc:
        cover = sampled.OpenCoverSpec.from_lists(doc["cover"])
        result["lebesgue"] = _seq_dict(sampled.lebesgue_sequence(sys_, cover, n_max))
    if "scales" in doc:
        est = sampled.box_dimension_estimate(sys_, doc["scales"])
        result["box_dimension"] = {
            "scales": list(est.scales),
            "covering_counts": list(est.covering_counts),
            "slope_lower": est.slope_lower,
            "slope_upper": est.slope_upper,
        }
    return result, 0


def _verify_bundle(kind: str, obj, doc: dict, params: dict) -> tuple[dict, dict]:
    """Builds the check bundle for one system; returns (bundle, context)."""
    n_max = params["n_max"]
    if kind == "sft":
        space: symbolic.SymbolicSpace = obj
        gseq = symbolic.gamma_sequence(space, n_max)
        dseq = symbolic.delta_sequence(space, n_max)
        ent = symbolic.entropy(space.matrix).value
        dim = symbolic.hausdorff_dimension(space)
        bundle = {
            "expansive_vs_lebesgue": {
                "gamma": gseq,
                "delta": dseq,
                "cover_max_diameter": 1.0 / space.q,
                "gamma1": symbolic.exact_expansive_constant(space, 1).value,
            },
            "entropy_dimension_bound": {"gamma": gseq, "dimension": dim,
                                        "entropy": ent},
            "sft_identity": {"gamma": gseq, "dimension": dim, "entropy": ent},
        }
        if space.sided == "two":
            # shift and inverse shift both stretch by at most q
            bundle["lipschitz_cap"] = {"gamma": gseq, "L": space.q,
                                       "L_inv": space.q}
        if n_max >= 8:
            power = GammaSequence(
                entries={k: gseq.entries[2 * k] for k in range(1, n_max // 2 + 1)},
                kind="exact",
                source=f"{gseq.source}, squared map",
            )
            bundle["power_scaling"] = {"base": gseq, "power": power, "n": 2}
        context = {"entropy": ent, "dimension": dim}
    elif kind == "torus":
        t: torus.ToralAutomorphism = obj
        grid = torus.RationalGrid(max(params["grids"]))
        upper, lower = torus.hE_bracket(t, n_max, grid, params["gamma1"])
        ent = torus.entropy(t)
        L, L_inv = torus.lipschitz_constants(t)
        bundle = {
            "torus_half_entropy": {"lower": lower, "upper": upper,
                                   "entropy": ent},
            "entropy_dimension_bound": {"gamma": lower,
                                        "dimension": float(t.dim),
                                        "entropy": ent},
            "lipschitz_cap": {"gamma": lower, "L": L, "L_inv": L_inv},
        }
        context = {"entropy": ent, "dimension": t.dim,
                   "gamma1": params["gamma1"], "Q": grid.Q}
    else:
        sys_: sampled.FiniteSampledSystem = obj
        if "cover" not in doc:
            raise ValueError(
                "verify for a sampled system needs a 'cover' field in the spec"
            )
        gseq = sampled.gamma_estimate_sequence(sys_, n_max, params["horizon"])
        cover = sampled.OpenCoverSpec.from_lists(doc["cover"])
        dseq = sampled.lebesgue_sequence(sys_, cover, n_max)
        bundle = {"expansive_vs_lebesgue": {"gamma": gseq, "delta": dseq}}
        context = {"points": sys_.point_count, "horizon": params["horizon"]}
    return bundle, context


def _run_verify(kind: str, obj, doc: dict, params: dict) -> tuple[dict, int]:
    bundle, context = _verify_bundle(kind, obj, doc, params)
    report = decay.verify_report(bundle, params["tail_fraction"])
    result = {
        "system": {"type": kind},
        "context": context,
        "report": report.to_dict(),
    }
    if params["scale"] != 1.0:
        result["note"] = "verification records are natural-log regardless of --log2"
    return result, 0 if report.passed else 1


def execute_command(command: str, doc: dict, params: dict,
                    manifest: RunManifest) -> tuple[dict, int]:
    """Pure dispatch: spec document in, result dictionary and exit code out."""
    kind, obj = parse_system_spec(doc)
    if command != "verify" and command != kind:
        raise ValueError(
            f"the spec describes a {kind} system, but the command is {command!r}"
        )
    if kind == "torus" and params.get("gamma1") is None:
        params = dict(params)
        params["gamma1"] = torus.certified_gamma1(obj)
    if command == "sft":
        result, code = _run_sft(obj, params)
    elif command == "torus":
        result, code = _run_torus(obj, params)
    elif command == "sampled":
        result, code = _run_sampled(obj, doc, params)
    elif command == "verify":
        result, code = _run_verify(kind, obj, doc, params)
    else:
        raise ValueError(f"unknown command {command!r}")
    result["log_base"] = "2" if params["scale"] != 1.0 else "e"
    result["manifest"] = manifest.to_dict()
    return result, code


# --------------------------------------------------------------- output

def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") + 0.0  # adding +0.0 drops a negative zero
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _manifest_comments(result: dict) -> list[str]:
    man = result["manifest"]
    return [
        f"# expanse {man['tool_version']}",
        f"# input sha256: {man['input_sha256']}",
        f"# command: {man['command']}",
        f"# timestamp: {man['timestamp']}",
    ]


def _csv_text(result: dict) -> str:
    lines = _manifest_comments(result)
    if "table" in result:
        lines.append("n,gamma,rate")
        for row in result["table"]:
            lines.append(f"{row['n']},{_fmt(row['gamma'])},{_fmt(row['rate'])}")
    elif "report" in result:
        lines.append("name,passed,left,right,slack")
        for c in result["report"]["checks"]:
            lines.append(
                f"{c['name']},{c['passed']},{_fmt(c['left'])},"
                f"{_fmt(c['right'])},{_fmt(c['slack'])}"
            )
    return "\n".join(lines) + "\n"


def _text_lines(result: dict) -> list[str]:
    man = result["manifest"]
    lines = [
        f"expanse {man['tool_version']}",
        f"input sha256: {man['input_sha256']}",
        f"command: {man['command']}",
        f"timestamp: {man['timestamp']}",
        f"log base: {result['log_base']}",
        "",
    ]
    if "entropy" in result:
        ent = result["entropy"]
        if isinstance(ent, dict):
            lines.append(f"entropy: {_fmt(ent['value'])} "
                         f"(converged={ent['converged']}, k={ent['iterations']})")
        else:
            lines.append(f"entropy: {_fmt(ent)}")
    if "hausdorff_dimension" in result:
        lines.append(f"hausdorff dimension: {_fmt(result['hausdorff_dimension'])}")
    if "gamma1" in result:
        g1 = result["gamma1"]
        lines.append(f"gamma1 ({g1['mode']}): {_fmt(g1['value'])}")
    if "lipschitz" in result:
        lines.append(f"lipschitz estimate: {_fmt(result['lipschitz'])}")
    for key in ("gamma_decay", "upper_decay", "lower_decay", "delta_decay"):
        if key in result and "error" not in result[key]:
            d = result[key]
            lines.append(
                f"{key}: hE_minus={_fmt(d['hE_minus'])} hE_plus={_fmt(d['hE_plus'])} "
                f"slope={_fmt(d['slope'])} window={d['window'][0]}..{d['window'][1]}"
            )
    if "lebesgue" in result:
        ent = result["lebesgue"]["entries"]
        pairs = " ".join(f"{n}:{_fmt(v)}" for n, v in sorted(
            ent.items(), key=lambda kv: int(kv[0])))
        lines.append(f"lebesgue: {pairs}")
    if "box_dimension" in result:
        b = result["box_dimension"]
        lines.append(
            f"box dimension: slopes [{_fmt(b['slope_lower'])}, "
            f"{_fmt(b['slope_upper'])}], counts {b['covering_counts']}"
        )
    if "table" in result:
        lines.append("")
        lines.append(f"{'n':>4}  {'gamma':>18}  {'rate':>18}")
        for row in result["table"]:
            lines.append(
                f"{row['n']:>4}  {_fmt(row['gamma']):>18}  {_fmt(row['rate']):>18}"
            )
    if "report" in result:
        lines.append("")
        for c in result["report"]["checks"]:
            tag = "PASS" if c["passed"] else "FAIL"
            lines.append(
                f"[{tag}] {c['name']}: {_fmt(c['left'])} vs {_fmt(c['right'])} "
                f"(slack {_fmt(c['slack'])})"
            )
            lines.append(f"       {c['inequality']}")
            for cav in c["caveats"]:
                lines.append(f"       note: {cav}")
        overall = "PASS" if result["report"]["passed"] else "FAIL"
        lines.append(f"overall: {overall}")
    return lines


def write_report(result: dict, fmt: str, out: str | None) -> str:
    """Render and emit a result; returns the exact text written."""
    rounded = _round12(result)
    if fmt == "json":
        text = json.dumps(rounded, sort_keys=True, indent=2, allow_nan=False) + "\n"
    elif fmt == "csv":
        text = _csv_text(rounded)
    elif fmt == "text":
        text = "\n".join(_text_lines(rounded)) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ----------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True,
                        help="path to a JSON spec, or inline JSON")
    common.add_argument("--n-max", dest="n_max", type=int, default=None,
                        help="largest iterate power n")
    common.add_argument("--grid", default=None,
                        help="comma-separated grid denominators Q (torus)")
    common.add_argument("--horizon", type=int, default=None,
                        help="orbit scan horizon K (sampled)")
    common.add_argument("--tail", type=float, default=0.5,
                        help="tail fraction for rate windows")
    common.add_argument("--format", dest="fmt",
                        choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--log2", action="store_true",
                        help="display rates and entropy in log base 2")
    common.add_argument("--unsafe", action="store_true",
                        help="lift the built-in size caps")
    parser = argparse.ArgumentParser(
        prog="expanse",
        description="expansive-constant decay toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("sft", "exact subshift computations"),
        ("torus", "toral automorphism brackets"),
        ("sampled", "finite sample estimates"),
        ("verify", "inequality verification"),
    ):
        sub.add_parser(name, parents=[common], help=blurb)
    return parser


def _resolve_params(args, kind: str, doc: dict) -> dict:
    defaults = _VERIFY_N_MAX if args.command == "verify" else _DEFAULT_N_MAX
    n_max = args.n_max
    if n_max is None and kind == "torus" and isinstance(doc.get("n_max"), int):
        n_max = doc["n_max"]
    if n_max is None:
        n_max = defaults[kind]
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    grids = None
    if kind == "torus":
        if args.grid is not None:
            try:
                grids = sorted({int(tok) for tok in args.grid.split(",")})
            except ValueError:
                raise ValueError(f"--grid must be integers, got {args.grid!r}")
        elif isinstance(doc.get("Q"), list) and doc["Q"]:
            grids = sorted({int(q) for q in doc["Q"]})
        elif isinstance(doc.get("Q"), int):
            grids = [doc["Q"]]
        else:
            grids = [64]
        if any(q < 2 for q in grids):
            raise ValueError("grid denominators must be >= 2")
    horizon = args.horizon
    if horizon is None:
        horizon = 8
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if not (0.0 < args.tail < 1.0):
        raise ValueError("tail fraction must lie in (0, 1)")
    gamma1 = None
    mode = "certified"
    if kind == "torus":
        conf = doc.get("gamma1")
        if isinstance(conf, dict):
            mode = conf.get("mode", "certified")
            if mode == "manual":
                if "value" not in conf:
                    raise ValueError("gamma1 mode 'manual' needs a value")
                gamma1 = float(conf["value"])
                if not gamma1 > 0:
                    raise ValueError("gamma1 must be positive")
            elif mode != "certified":
                raise ValueError(f"unknown gamma1 mode {mode!r}")
    return {
        "n_max": n_max,
        "grids": grids,
        "horizon": horizon,
        "tail_fraction": args.tail,
        "gamma1": gamma1,
        "gamma1_mode": mode,
        "scale": math.log(2.0) if args.log2 else 1.0,
        "log2": args.log2,
        "unsafe": args.unsafe,
        "format": args.fmt,
    }


def _enforce_caps(params: dict, kind: str, doc: dict):
    if params["unsafe"]:
        return
    if params["n_max"] > N_MAX_CAP:
        raise ValueError(
            f"n_max {params['n_max']} exceeds the cap {N_MAX_CAP} "
            "(pass --unsafe to override)"
        )
    if params["grids"] and max(params["grids"]) > GRID_CAP:
        raise ValueError(
            f"grid denominator {max(params['grids'])} exceeds the cap "
            f"{GRID_CAP} (pass --unsafe to override)"
        )
    if kind == "sampled":
        pts = doc.get("points", 0)
        if isinstance(pts, int) and pts > POINTS_CAP:
            raise ValueError(
                f"{pts} sample points exceed the cap {POINTS_CAP} "
                "(pass --unsafe to override)"
            )


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        doc, digest = _load_spec(args.spec)
        kind, obj = parse_system_spec(doc)
        params = _resolve_params(args, kind, doc)
        _enforce_caps(params, kind, doc)
        if kind == "torus" and params["gamma1"] is None:
            params["gamma1"] = torus.certified_gamma1(obj)
        manifest = RunManifest(
            tool_version=__version__,
            input_sha256=digest,
            command="expanse " + " ".join(shlex.quote(a) for a in argv),
            timestamp=_timestamp(),
            params={
                k: params[k]
                for k in ("n_max", "grids", "horizon", "tail_fraction",
                          "gamma1_mode", "log2", "format")
            },
        )
        result, code = execute_command(args.command, doc, params, manifest)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 1
    write_report(result, args.fmt, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
