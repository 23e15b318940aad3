"""Command-line entry point.

Subcommands cover the full workflow: generate trajectories, export and
simulate G-code, run single trials, run benchmark sweeps, and plot reports.
Exit codes: 0 on success, 1 on usage/configuration errors, 2 on runtime
errors (printed with a module-qualified exception name).
"""

import argparse
import json
import os
import sys

from . import bench, charts, configio, gcode, percept, plant, traj, trial
from .bench import SweepSpec
from .configio import ConfigError, Settings
from .trial import TrialConfig

_PERCEPTION_ALIASES = {
    "wrist": "wrist",
    "single": "single_hand",
    "single_hand": "single_hand",
    "dual": "dual_hand",
    "dual_hand": "dual_hand",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors instead of argparse's 2
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _parse_perception(name: str) -> str:
    try:
        return _PERCEPTION_ALIASES[name]
    except KeyError:
        raise _UsageError(
            f"unknown perception system {name!r} (choose from wrist, single, dual)"
        ) from None


def _float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise _UsageError(f"{flag} expects a comma-separated number list, got {text!r}") from None


def _settings(args) -> Settings:
    return configio.load_settings(getattr(args, "config", None), getattr(args, "set", None))


def _add_config_flags(p) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON configuration file")
    p.add_argument(
        "--set", action="append", metavar="KEY=VALUE", default=[],
        help="override a config value (dotted keys, e.g. plant.cube_side=40)",
    )


def _load_or_generate(args, settings: Settings) -> traj.Trajectory:
    if getattr(args, "traj", None):
        return traj.load_trajectory(args.traj)
    if getattr(args, "seed", None) is None:
        raise _UsageError("provide either --seed or --traj")
    import dataclasses

    params = dataclasses.replace(
        settings.traj_params,
        seed=args.seed,
        n_segments=args.segments if getattr(args, "segments", None) is not None
        else settings.traj_params.n_segments,
    )
    return traj.generate(params)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _cmd_traj_gen(args) -> int:
    settings = _settings(args)
    trajectory = _load_or_generate(args, settings)
    doc = json.dumps(traj.trajectory_to_dict(trajectory), indent=2) + "\n"
    _write_or_print(doc, args.out)
    return 0


def _cmd_traj_gcode(args) -> int:
    settings = _settings(args)
    trajectory = _load_or_generate(args, settings)
    _write_or_print(traj.emit_gcode(trajectory, args.speed), args.out)
    return 0


def _cmd_gcode_sim(args) -> int:
    with open(args.program, "r", encoding="utf-8") as f:
        text = f.read()
    timeline = gcode.plan(
        gcode.parse(text), gcode.PlannerConfig(speed_cap=args.speed_cap, accel=args.accel)
    )
    lines = ["t,x,y"]
    t = 0.0
    end = timeline.total_duration
    while True:
        x, y = timeline.position_at(min(t, end))
        lines.append(f"{min(t, end)!r},{x!r},{y!r}")
        if t >= end:
            break
        t += args.dt
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def _trial_config(args, settings: Settings) -> TrialConfig:
    import dataclasses

    plant_cfg = dataclasses.replace(settings.plant, cube_side=args.cube)
    kind = _parse_perception(args.perception)
    return TrialConfig(
        trajectory=_load_or_generate(args, settings),
        speed=args.speed,
        plant=plant_cfg,
        perception=configio.build_perception(settings, kind, plant_cfg),
        controller=settings.controller,
        loss_frames=settings.loss_frames,
        max_duration=settings.max_duration,
    )


def _cmd_trial_run(args) -> int:
    settings = _settings(args)
    config = _trial_config(args, settings)
    result = trial.run_trial(config, trace_path=args.trace)
    record = {
        "outcome": result.outcome.value,
        "grasp_time_s": result.grasp_time,
        "frames": result.frames,
        "speed_mm_s": args.speed,
        "cube_mm": args.cube,
        "perception": config.perception.kind,
        "trace": result.trace_path,
    }
    print(json.dumps(record))
    return 0


def _cmd_bench_run(args) -> int:
    settings = _settings(args)
    if args.seed_list:
        seeds = tuple(int(v) for v in args.seed_list.split(",") if v.strip())
    else:
        seeds = tuple(range(args.seeds))
    kinds = tuple(_parse_perception(k.strip()) for k in args.perception.split(","))
    spec = SweepSpec(
        trajectory_seeds=seeds,
        speeds=_float_list(args.speeds, "--speeds"),
        cube_sides=_float_list(args.cubes, "--cubes"),
        perception_kinds=kinds,
        plant=settings.plant,
        controller=settings.controller,
        traj_params=settings.traj_params,
        loss_frames=settings.loss_frames,
        max_duration=settings.max_duration,
        repeats=args.repeats,
    )
    report = bench.run_benchmark(spec, jobs=args.jobs)
    paths = bench.write_report(report, args.out_dir)
    if args.plot:
        rows = bench.parse_report_csv(bench.report_csv(report))
        charts.render_report_charts(rows, args.out_dir)
    print(f"{spec.n_trials} trials -> {paths['report_csv']}")
    return 0


def _cmd_bench_plot(args) -> int:
    with open(args.csv, "r", encoding="utf-8") as f:
        rows = bench.parse_report_csv(f.read())
    if not rows:
        raise ValueError(f"{args.csv}: no report rows")
    for path in charts.render_report_charts(rows, args.out_dir):
        print(path)
    return 0


def _cmd_percept_view(args) -> int:
    settings = _settings(args)
    import dataclasses

    plant_cfg = dataclasses.replace(settings.plant, cube_side=args.cube)
    kind = _parse_perception(args.perception)
    rig = configio.build_perception(settings, kind, plant_cfg)
    ee = tuple(float(v) for v in args.ee.split(","))
    if len(ee) != 3:
        raise _UsageError("--ee expects x,y,z")
    timeline = gcode.MotionTimeline((0.0, 0.0), ())
    state = plant.init(plant_cfg, timeline)
    state = dataclasses.replace(state, ee_pos=ee)
    os.makedirs(args.out_dir, exist_ok=True)
    for cam in rig.cameras:
        path = os.path.join(args.out_dir, f"view_{kind}_{cam.id}.svg")
        with open(path, "w", encoding="utf-8") as f:
            f.write(_camera_view_svg(cam, plant_cfg, state))
        print(path)
    return 0


def _camera_view_svg(cam, plant_cfg, state) -> str:
    """Debug rendering of one camera's normalized image."""
    size = 420
    pad = 10

    def sx(u):
        return pad + (u + 1.0) / 2.0 * (size - 2 * pad)

    def sy(v):
        return pad + (v + 1.0) / 2.0 * (size - 2 * pad)

    def path_of(pts):
        return " ".join(f"{sx(u):.2f},{sy(v):.2f}" for u, v in pts)

    obs = percept.observe(cam, plant_cfg, state)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="#f8f8f8"/>',
        f'<rect x="{pad}" y="{pad}" width="{size - 2 * pad}" height="{size - 2 * pad}" '
        'fill="white" stroke="#333"/>',
    ]
    for occ in cam.occluders:
        parts.append(f'<polygon points="{path_of(occ)}" fill="#bbb" fill-opacity="0.7"/>')
    cam_pos = tuple(state.ee_pos[i] + cam.translation[i] for i in range(3))
    verts = percept._box_vertices(state.object_center, plant_cfg.cube_side / 2.0)
    cam_verts = []
    for w in verts:
        d = tuple(w[i] - cam_pos[i] for i in range(3))
        cam_verts.append(
            tuple(sum(d[j] * cam.axes[i][j] for j in range(3)) for i in range(3))
        )
    sil = percept._silhouette(cam, cam_verts)
    if sil:
        parts.append(f'<polygon points="{path_of(sil)}" fill="#d62728" fill-opacity="0.6"/>')
    try:
        gu, gv = percept.desired_point(cam, plant_cfg)
        parts.append(
            f'<g stroke="#2ca02c" stroke-width="2">'
            f'<line x1="{sx(gu) - 6:.2f}" y1="{sy(gv):.2f}" x2="{sx(gu) + 6:.2f}" y2="{sy(gv):.2f}"/>'
            f'<line x1="{sx(gu):.2f}" y1="{sy(gv) - 6:.2f}" x2="{sx(gu):.2f}" y2="{sy(gv) + 6:.2f}"/></g>'
        )
    except percept.GoalOutsideView:
        pass
    if obs.visible:
        parts.append(
            f'<circle cx="{sx(obs.centroid[0]):.2f}" cy="{sy(obs.centroid[1]):.2f}" r="4" fill="#1f77b4"/>'
        )
    parts.append(
        f'<text x="{pad + 4}" y="{size - 14}" font-family="sans-serif" font-size="12">'
        f"{cam.id}: visible={obs.visible}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _build_parser() -> _Parser:
    parser = _Parser(prog="dynagrasp", description=__doc__)
    sub = parser.add_subparsers(dest="group")

    p_traj = sub.add_parser("traj", help="trajectory generation and export")
    traj_sub = p_traj.add_subparsers(dest="command")

    p = traj_sub.add_parser("gen", help="generate a trajectory file")
    p.add_argument("--seed", type=int, help="trajectory seed")
    p.add_argument("--segments", type=int, help="number of straight segments")
    p.add_argument("--out", metavar="FILE", help="output path (stdout if omitted)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_traj_gen)

    p = traj_sub.add_parser("gcode", help="export a trajectory as G-code")
    p.add_argument("--seed", type=int)
    p.add_argument("--segments", type=int)
    p.add_argument("--traj", metavar="FILE", help="trajectory file instead of a seed")
    p.add_argument("--speed", type=float, required=True, help="feed along the path, mm/s")
    p.add_argument("--out", metavar="FILE")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_traj_gcode)

    p_gcode = sub.add_parser("gcode", help="G-code tools")
    gcode_sub = p_gcode.add_subparsers(dest="command")
    p = gcode_sub.add_parser("sim", help="simulate a program; prints CSV of t,x,y")
    p.add_argument("program", metavar="FILE")
    p.add_argument("--dt", type=float, default=0.04, help="sample interval, s")
    p.add_argument("--accel", type=float, default=None, help="finite acceleration, mm/s^2")
    p.add_argument("--speed-cap", type=float, default=250.0, help="platform speed cap, mm/s")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_gcode_sim)

    p_trial = sub.add_parser("trial", help="single grasp trials")
    trial_sub = p_trial.add_subparsers(dest="command")
    p = trial_sub.add_parser("run", help="run one trial; prints a JSON record")
    p.add_argument("--seed", type=int)
    p.add_argument("--segments", type=int)
    p.add_argument("--traj", metavar="FILE")
    p.add_argument("--speed", type=float, required=True)
    p.add_argument("--cube", type=float, default=30.0)
    p.add_argument("--perception", default="wrist", help="wrist | single | dual")
    p.add_argument("--trace", metavar="FILE", help="write a per-tick CSV trace")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_trial_run)

    p_bench = sub.add_parser("bench", help="benchmark sweeps and reports")
    bench_sub = p_bench.add_subparsers(dest="command")
    p = bench_sub.add_parser("run", help="run a sweep; writes CSV + metadata")
    p.add_argument("--seeds", type=int, default=20, help="use seeds 0..N-1")
    p.add_argument("--seed-list", help="explicit comma-separated seed list")
    p.add_argument("--speeds", default="100,125,150,175,200")
    p.add_argument("--cubes", default="30,40")
    p.add_argument("--perception", default="wrist,single,dual")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    p.add_argument("--plot", action="store_true", help="also render SVG charts")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_bench_run)

    p = bench_sub.add_parser("plot", help="render SVG charts from a report CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_bench_plot)

    p_view = sub.add_parser("percept", help="camera debugging views")
    view_sub = p_view.add_subparsers(dest="command")
    p = view_sub.add_parser("view", help="dump each camera's projected view as SVG")
    p.add_argument("--perception", default="dual")
    p.add_argument("--cube", type=float, default=30.0)
    p.add_argument("--ee", default="0,0,500", help="end-effector position x,y,z (mm)")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_percept_view)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    if not hasattr(args, "func"):
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime errors: module-qualified, exit 2
        cls = type(exc)
        print(f"error: {cls.__module__}.{cls.__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
