"""Command-line interface: run, verify, analyze, noisy, refresh.

Exit codes: 0 success, 1 configuration error, 2 property violation,
3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .analysis import (
    capacity,
    capacity_sweep,
    helper_bound,
    mcgill_mmi_bruteforce,
    mcgill_mmi_closed,
    min_partition_mmi,
    sweep_csv,
)
from .errors import BudgetExceeded, ConfigError, SkaError
from .netsim import run_trials, trials_csv
from .protocol import ScenarioConfig, params_to_dict, refresh_key, run_protocol
from .rs import RsParams
from .secrecy import enumerate_refresh, leaky_config, secrecy_report

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3


def exact(x: Fraction, unit: str = "log2(q)") -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator), "unit": unit}


def envelope(command: str, inputs: dict, outputs: dict, exact_values: dict | None = None) -> str:
    body = {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "outputs": outputs,
        "exact_values": exact_values or {},
    }
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> ScenarioConfig:
    # overrides go in before validation so --mode can rescue a file
    with open(args.scenario, encoding="utf-8") as fh:
        data = json.load(fh)
    if getattr(args, "seed", None) is not None:
        data["seed"] = str(args.seed)
    if getattr(args, "mode", None):
        data["mode"] = args.mode
    return ScenarioConfig.from_dict(data)


def cmd_run(args) -> int:
    cfg = _load(args)
    result = run_protocol(cfg)
    emit(envelope("run", cfg.to_dict(), result.to_dict()), args.out)
    return EXIT_OK if result.agreement else EXIT_VIOLATION


def cmd_verify(args) -> int:
    cfg = _load(args)
    if args.leaky:
        cfg = leaky_config(cfg)
    report = secrecy_report(cfg, cap=args.cap, workers=args.workers)
    secure = report["mi_exact_zero"] and report["attack_uniform"]
    exact_values = {"mi": exact(Fraction(0), "bits")} if report["mi_exact_zero"] else {}
    emit(envelope("verify", cfg.to_dict(), report, exact_values), args.out)
    return EXIT_OK if secure else EXIT_VIOLATION


def _range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi or lo) + 1)


def cmd_analyze(args) -> int:
    if args.mcgill:
        if args.n is None:
            raise ConfigError("--mcgill needs --n")
        lines = ["n,k,closed,bruteforce,agree"]
        ok = True
        for n in range(1, args.n + 1):
            for k in range(1, n + 1):
                c, b = mcgill_mmi_closed(n, k), mcgill_mmi_bruteforce(n, k)
                ok &= c == b
                lines.append(f"{n},{k},{c},{b},{str(c == b).lower()}")
        emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK if ok else EXIT_VIOLATION
    if args.q is None:
        raise ConfigError("--q is required")
    if args.sweep:
        emit(sweep_csv(capacity_sweep(_range(args.sweep), args.q, helpers=args.sweep_helpers)), args.out)
        return EXIT_OK
    if args.n is None or args.k is None:
        raise ConfigError("--n and --k are required")
    n, k, q = args.n, args.k, args.q
    inputs = {"n": str(n), "k": str(k), "q": str(q)}
    outputs, exact_values = {}, {}
    if args.active is not None or args.helpers is not None:
        helpers = args.helpers if args.helpers is not None else n - args.active
        active = args.active if args.active is not None else n - helpers
        inputs.update(active=str(active), helpers=str(helpers))
        rep = helper_bound(n, k, q, active, helpers)
        outputs["helper_bound"] = {"regime": rep.regime, "upper_bound": True, "value_bits": rep.bits}
        exact_values["helper_bound"] = exact(rep.value)
    rep = capacity(n, k, q)
    outputs["capacity"] = {"regime": rep.regime, "value_bits": rep.bits}
    exact_values["capacity"] = exact(rep.value)
    outputs["mcgill_mmi"] = {"coefficient_of_log_q": str(mcgill_mmi_closed(n, k))}
    if args.partitions:
        mmi = min_partition_mmi(n, k, q, per_partition=n <= 8)
        outputs["min_partition_mmi"] = mmi.to_dict()
        outputs["min_partition_mmi"]["agrees_with_capacity"] = mmi.value == rep.value
        exact_values["min_partition_mmi"] = exact(mmi.value)
    emit(envelope("analyze", inputs, outputs, exact_values), args.out)
    return EXIT_OK


def cmd_noisy(args) -> int:
    cfg = _load(args)
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    rows = run_trials(cfg, args.erasure, args.redundancy, args.trials, seed=args.seed,
                      adversary_sees_erased=args.adversary_sees_erased)
    emit(trials_csv(rows), args.out)
    return EXIT_OK


def cmd_refresh(args) -> int:
    params = RsParams.create(args.q, args.n, args.k)
    old = [int(x) for x in args.old.split(",") if x.strip()] if args.old else []
    key, transcript = refresh_key(old, params, args.seed)
    inputs = {"params": params_to_dict(params), "old": [str(v) for v in old]}
    if args.seed is not None:
        inputs["seed"] = str(args.seed)
    outputs = {"new_key": [str(v) for v in key.ints()], "transcript": transcript.to_dict()}
    code = EXIT_OK
    if args.verify:
        sec = enumerate_refresh(params, len(old), cap=args.cap)
        outputs["verification"] = {
            "states": str(sec.joint.total),
            "mi_old_transcript_exact_zero": sec.mi_old.exact_zero,
            "mi_secret_transcript_exact_zero": sec.mi_secret.exact_zero,
        }
        code = EXIT_OK if sec.exact_zero else EXIT_VIOLATION
    emit(envelope("refresh", inputs, outputs), args.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ska-mds", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the protocol on a scenario file")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["unique_share", "common_share"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="exhaustive secrecy check of a scenario")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--cap", type=int, help="enumeration cap in states")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--leaky", action="store_true", help="negative control: broadcast k symbols")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="capacity, helper bound, MMI")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--active", type=int)
    p.add_argument("--helpers", type=int)
    p.add_argument("--partitions", action="store_true", help="also minimise over all partitions")
    p.add_argument("--mcgill", action="store_true", help="closed form vs brute force table up to --n")
    p.add_argument("--sweep", metavar="LO:HI", help="CSV sweep over n in LO..HI")
    p.add_argument("--sweep-helpers", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("noisy", help="seeded trials over an erasure channel")
    p.add_argument("scenario")
    p.add_argument("--erasure", type=float, default=0.0)
    p.add_argument("--redundancy", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--adversary-sees-erased", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_noisy)

    p = sub.add_parser("refresh", help="refresh a shared key")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--old", default="", help="comma-separated old key symbols")
    p.add_argument("--seed", type=int)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--cap", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_refresh)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SkaError as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
