"""Operator command line: calibrate, simulate, serve, analyze, export.

Exit codes: 0 ok, 2 validation failure, 3 I/O failure, 4 internal error.
Failures print one machine-parsable JSON line to stderr.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

from .agents import AgentSpec
from .engine import GameConfig, RoundRecord, load_session_file, run_session, save_session_file
from .errors import DomainError, LogParseError, RejectedDecision, UnsupportedCycleLength
from .extortion import (
    ExtortionConfig,
    deviation_curve,
    find_best_cycle,
    max_valid_k,
    response_surface,
    solve_response,
    stationary_best_response,
)
from .market import MarketParams, profit_pair, reference_points
from .metrics import (
    median_timeseries,
    paired_t_test,
    per_session_means,
    rank_sum_test,
    summarize,
)

AGENT_SHORTHANDS = {
    "collusive": ("collusive", {}),
    "myopic": ("myopic_best_response", {}),
    "random": ("random_uniform", {}),
    "learner": ("epsilon_greedy_learner", {}),
}


def _load_market(path: str | None) -> MarketParams:
    if path is None:
        return MarketParams()
    with open(path, "r", encoding="utf-8") as f:
        d = json.load(f)
    kwargs = {k: d[k] for k in ("a", "c", "demand_scale") if k in d}
    for k in ("x_bounds", "y_bounds"):
        if k in d:
            kwargs[k] = tuple(d[k])
    return MarketParams(**kwargs)


def parse_agent_spec(text: str, seed: int) -> AgentSpec:
    """Agent from JSON or shorthand: collusive | myopic | random | learner |
    stationary:<x> | cycle:<q1,q2,...>."""
    text = text.strip()
    if text.startswith("{"):
        d = json.loads(text)
        return AgentSpec(kind=d["kind"], params=d.get("params", {}), seed=d.get("seed", seed))
    if text in AGENT_SHORTHANDS:
        kind, params = AGENT_SHORTHANDS[text]
        return AgentSpec(kind=kind, params=params, seed=seed)
    if ":" in text:
        name, arg = text.split(":", 1)
        if name == "stationary":
            return AgentSpec(kind="stationary", params={"x": float(arg)}, seed=seed)
        if name == "cycle":
            seq = [float(v) for v in arg.split(",") if v.strip()]
            return AgentSpec(kind="cycle", params={"sequence": seq}, seed=seed)
    raise DomainError(f"unknown agent spec {text!r}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


# --- subcommands --------------------------------------------------------------


def cmd_calibrate(args) -> int:
    market = _load_market(args.params_file)
    refs = reference_points(market)
    print(f"nash q={refs.nash.q:.6f} price={refs.nash.price:.6f} profit={refs.nash.profit:.6f}")
    print(f"jpm q={refs.jpm.q:.6f} price={refs.jpm.price:.6f} profit={refs.jpm.profit:.6f}")
    print(
        f"walrasian q_total={refs.walrasian.q_total:.6f} "
        f"price={refs.walrasian.price:.6f} profit={refs.walrasian.profit:.6f}"
    )

    if args.k is not None:
        cfg = ExtortionConfig(k=args.k, s_n=refs.nash.profit, clamp="unclamped")
        x_c, payoff = stationary_best_response(cfg, market)
        y_c = solve_response(x_c, cfg, market)
        s_x, s_y = profit_pair(x_c, y_c, market, relaxed=True)
        print(
            f"k={args.k:.6f} stationary_x={x_c:.6f} response_y={y_c:.6f} "
            f"profit_x={s_x:.6f} profit_y={s_y:.6f}"
        )
        best = find_best_cycle(args.n, cfg, market)
        if best.mean_payoff > payoff + 1e-9:
            witness = ",".join(f"{v:.4f}" for v in best.xs)
            print(
                f"k={args.k:.6f} INVALID witness=[{witness}] "
                f"cycle_payoff={best.mean_payoff:.6f} stationary={payoff:.6f}"
            )
        else:
            print(f"k={args.k:.6f} VALID best_cycle={best.mean_payoff:.6f} stationary={payoff:.6f}")

    if not args.no_kmax:
        k_max = max_valid_k(market, n=args.n)
        print(f"k_max n={args.n} value={k_max:.6f}")

    if args.surface_csv:
        k = args.k if args.k is not None else 1.296
        rows = [(f"{x:.6f}", repr(y), f"{k:.6f}") for x, y in
                response_surface(k, args.surface_step, market)]
        _write_csv(args.surface_csv, ["x", "y", "k"], rows)
        print(f"surface_csv={args.surface_csv}")
    if args.curve_csv:
        lo, hi, step = (float(v) for v in args.curve_k_range.split(":"))
        rows = [(f"{k:.6f}", repr(x2), repr(p)) for k, x2, p in
                deviation_curve((lo, hi), args.curve_x1, market, k_step=step)]
        _write_csv(args.curve_csv, ["k", "x2", "payoff"], rows)
        print(f"curve_csv={args.curve_csv}")
    return 0


def cmd_simulate(args) -> int:
    market = _load_market(args.params_file)
    refs = reference_points(market)
    cfg = GameConfig(
        market=market,
        extortion=ExtortionConfig(k=args.k, s_n=refs.nash.profit),
        rounds=args.rounds,
        rounding=args.rounding,
        pin_y=args.pin_y,
    )
    agent = parse_agent_spec(args.agent, args.seed)
    session = run_session(cfg, agent, seed=args.seed)
    save_session_file(session, args.out)
    last = session.rounds_log[-1]
    print(
        f"session={session.session_id} rounds={len(session.rounds_log)} "
        f"cum_x={last.cum_x!r} out={args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.config import load_service_config

    overrides = {}
    if args.host:
        overrides["host"] = args.host
    if args.port:
        overrides["port"] = args.port
    if args.data_dir:
        overrides["data_dir"] = args.data_dir
    config = load_service_config(args.config, **overrides)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _collect_logs(paths) -> list:
    files = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.glob("*.jsonl")))
        else:
            files.append(path)
    if not files:
        raise DomainError("no session logs found")
    return [load_session_file(f) for f in files]


def _parse_window(text: str) -> tuple[int, int]:
    lo, hi = text.split(":")
    return int(lo), int(hi)


def cmd_analyze(args) -> int:
    sessions = _collect_logs(args.logs)
    rounds = min(len(s.rounds_log) for s in sessions)
    if rounds == 0:
        raise DomainError("sessions contain no rounds")
    if args.window:
        windows = [_parse_window(args.window)]
    else:
        windows = [(1, rounds)]
        if rounds >= 2:
            half = rounds // 2
            windows += [(1, half), (half + 1, rounds)]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary_rows = []
    for lo, hi in windows:
        table = summarize(sessions, (lo, hi))
        for measure, stats in table.items():
            summary_rows.append(
                (lo, hi, measure, repr(stats.average), repr(stats.stdev), repr(stats.median))
            )
    _write_csv(out_dir / "summary.csv",
               ["window_lo", "window_hi", "measure", "average", "stdev", "median"],
               summary_rows)

    nash = reference_points(sessions[0].config.market).nash.profit
    test_rows = []
    for lo, hi in windows:
        human = per_session_means(sessions, (lo, hi), "s_x")
        algo = per_session_means(sessions, (lo, hi), "s_y")
        nash_vec = [nash] * len(sessions)
        for name, a, b in (
            ("algorithm_vs_human", algo, human),
            ("algorithm_vs_nash", algo, nash_vec),
            ("human_vs_nash", human, nash_vec),
        ):
            test_rows.append((lo, hi, name, repr(rank_sum_test(a, b)), repr(paired_t_test(a, b))))
    _write_csv(out_dir / "tests.csv",
               ["window_lo", "window_hi", "hypothesis", "rank_sum_p", "paired_t_p"],
               test_rows)

    series = {
        field: dict(median_timeseries(sessions, field))
        for field in ("x", "total", "degree", "dwl")
    }
    ts_rows = [
        (r, repr(series["x"][r]), repr(series["total"][r]),
         repr(series["degree"][r]), repr(series["dwl"][r]))
        for r in range(1, len(sessions[0].rounds_log) + 1)
    ]
    _write_csv(out_dir / "timeseries.csv",
               ["round", "median_x", "median_total", "median_degree", "median_dwl"],
               ts_rows)

    for lo, hi, name, rs, tt in test_rows:
        print(f"window={lo}:{hi} {name} rank_sum_p={rs} paired_t_p={tt}")
    print(f"out_dir={out_dir}")
    return 0


EXPORT_HEADER = ["round", "x", "y", "sx", "sy", "cumx"]


def cmd_export(args) -> int:
    if args.format != "csv":
        raise DomainError(f"unknown export format {args.format!r}")
    session = load_session_file(args.log)
    rows = [
        (r.round, f"{r.x:.2f}", f"{r.y:.2f}", repr(r.s_x), repr(r.s_y), repr(r.cum_x))
        for r in session.rounds_log
    ]
    _write_csv(args.out, EXPORT_HEADER, rows)
    print(f"rows={len(rows)} out={args.out}")
    return 0


def read_rounds_csv(path) -> list[RoundRecord]:
    """Inverse of the CSV export, for external-tool round trips."""
    out = []
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for row in reader:
            out.append(RoundRecord(
                round=int(row["round"]),
                x=float(row["x"]),
                y=float(row["y"]),
                s_x=float(row["sx"]),
                s_y=float(row["sy"]),
                cum_x=float(row["cumx"]),
            ))
    return out


# --- driver -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cournotlab")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="reference points, stationary response, validity range")
    c.add_argument("--params-file")
    c.add_argument("--k", type=float)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--no-kmax", action="store_true")
    c.add_argument("--surface-csv")
    c.add_argument("--surface-step", type=float, default=0.01)
    c.add_argument("--curve-csv")
    c.add_argument("--curve-x1", type=float, default=0.1)
    c.add_argument("--curve-k-range", default="1.0:3.5:0.05")
    c.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("simulate", help="run a session against a simulated rival")
    s.add_argument("--agent", required=True)
    s.add_argument("--k", type=float, default=1.296)
    s.add_argument("--rounds", type=int, default=600)
    s.add_argument("--rounding", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pin-y", type=float, default=None)
    s.add_argument("--params-file")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("serve", help="start the experiment HTTP service")
    v.add_argument("--config")
    v.add_argument("--host")
    v.add_argument("--port", type=int)
    v.add_argument("--data-dir")
    v.set_defaults(func=cmd_serve)

    a = sub.add_parser("analyze", help="summaries, test battery, and time series from logs")
    a.add_argument("logs", nargs="+")
    a.add_argument("--window")
    a.add_argument("--out-dir", default=".")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("export", help="convert a session log for external tooling")
    e.add_argument("--log", required=True)
    e.add_argument("--format", default="csv")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_export)

    return p


def _fail(code: int, kind: str, exc: Exception) -> int:
    line = json.dumps({"error": kind, "exit": code, "message": str(exc)})
    print(line, file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, RejectedDecision, UnsupportedCycleLength, LogParseError, ValueError) as exc:
        return _fail(2, "validation", exc)
    except OSError as exc:
        return _fail(3, "io", exc)
    except Exception as exc:  # pragma: no cover - defensive
        return _fail(4, "internal", exc)


if __name__ == "__main__":
    sys.exit(main())
