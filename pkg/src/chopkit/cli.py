"""Command-line front end.

Subcommands: ik, fk, workspace, hull, validate, ft-sim, stiffness,
grasp-sim, bus-demo.  Exit codes: 0 success, 1 domain error (out of reach,
bad file, ...), 2 usage error.  All randomness is controlled by explicit
--seed flags, so identical invocations produce byte-identical outputs.
Domain errors print to stderr, or as a JSON object on stdout with
--json-errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bus as busmod
from . import grasp as graspmod
from . import hull as hullmod
from . import sensing
from . import validation
from . import workspace as wsmod
from .config import DualConfig, PlatformCommand, TipPose, load_config
from .errors import ChopkitError
from .kinematics import forward_kinematics, inverse_kinematics


def _load_dual(args) -> DualConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return DualConfig()


def _platform_params(args):
    dual = _load_dual(args)
    return dual.left if getattr(args, "platform", "left") == "left" else dual.right


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_ik(args) -> int:
    params = _platform_params(args)
    sol = inverse_kinematics(params, TipPose(args.x, args.y, args.z))
    _emit({
        "delta_p_deg": sol.command.delta_p,
        "delta_y_deg": sol.command.delta_y,
        "d_p_mm": sol.command.d_p,
        "phi_deg": math.degrees(sol.dir.phi),
        "psi_deg": math.degrees(sol.dir.psi),
        "z_calc_mm": sol.z_calc,
    })
    return 0


def cmd_fk(args) -> int:
    params = _platform_params(args)
    pose = forward_kinematics(params, PlatformCommand(args.pitch, args.yaw, args.travel))
    _emit({"x_mm": pose.x, "y_mm": pose.y, "z_mm": pose.z})
    return 0


def cmd_workspace(args) -> int:
    params = _platform_params(args)
    box = None
    if args.box:
        b = args.box
        box = ((b[0], b[1]), (b[2], b[3]), (b[4], b[5]))
    samples = wsmod.sample_workspace(params, args.n, box=box, seed=args.seed)
    wsmod.write_samples_csv(samples, args.out)
    reachable = [s for s in samples if s.reachable]
    if args.pairs_out:
        model = wsmod.BacklashModel(epsilon_servo=args.deadband, seed=args.seed)
        pairs = wsmod.simulate_observed(params, [s.target for s in reachable], model)
        validation.write_pose_pairs_csv(pairs, args.pairs_out)
    _emit({"n": len(samples), "reachable": len(reachable),
           "unreachable": len(samples) - len(reachable)})
    return 0


def cmd_hull(args) -> int:
    samples = wsmod.read_samples_csv(args.samples)
    points = wsmod.reachable_points(samples)
    hull = hullmod.convex_hull(points)
    if args.mesh:
        hullmod.save_hull_off(hull, args.mesh)
    _emit({"volume_mm3": hull.volume,
           "vertices": int(len(hull.vertices)),
           "faces": int(len(hull.faces))})
    return 0


def cmd_validate(args) -> int:
    records = validation.ingest_csv(args.pairs)
    report = validation.error_report(records)
    sys.stdout.write(validation.render_report(report, args.format))
    return 0


def cmd_ft_sim(args) -> int:
    model = sensing.SensorModel()
    cycle = sensing.make_grip_cycles(
        stiffness=args.stiffness, rest_width=args.rest_width,
        depth=args.depth, cycles=args.cycles)
    stream = sensing.simulate_grip_cycle(model, cycle, seed=args.seed)
    sensing.write_stream_csv(stream, args.out)
    if args.closure_out:
        sensing.write_closure_csv(cycle, args.closure_out)
    _emit({"samples": len(stream), "duration_s": stream[-1].t,
           "cycles": args.cycles})
    return 0


def cmd_stiffness(args) -> int:
    stream = sensing.read_stream_csv(args.stream)
    closure = sensing.read_closure_csv(args.closure)
    estimate = sensing.estimate_stiffness(stream, closure)
    _emit({"k_hat_n_per_mm": estimate.k_hat,
           "r_squared": estimate.r_squared,
           "contact_onset_s": estimate.contact_onset})
    return 0


def cmd_grasp_sim(args) -> int:
    dual = _load_dual(args)
    items = graspmod.load_food_items(args.items)
    rows = graspmod.run_trial_suite(dual, items, grip_force=args.grip_force)
    sys.stdout.write(graspmod.render_trial_report(rows, args.format))
    return 0


def cmd_bus_demo(args) -> int:
    params = _platform_params(args)
    sol = inverse_kinematics(params, TipPose(args.x, args.y, args.z))
    cmd = sol.command
    frames = (busmod.encode(busmod.set_goal_angle(1, cmd.delta_p))
              + busmod.encode(busmod.set_goal_angle(2, cmd.delta_y))
              + busmod.encode(busmod.set_goal_travel(busmod.LoopbackBus.LINEAR_ID, cmd.d_p)))
    bus = busmod.LoopbackBus(rom_deg=params.servo_rom, travel_mm=params.linear_travel)
    bus.exchange(frames)
    bus.settle(args.settle)
    reads = (busmod.encode(busmod.read_state(1))
             + busmod.encode(busmod.read_state(2))
             + busmod.encode(busmod.read_state(busmod.LoopbackBus.LINEAR_ID)))
    replies = bus.exchange(reads)
    states = {f.servo_id: busmod.parse_state_reply(f)
              for f in busmod.decode(replies).frames}
    settled = PlatformCommand(delta_p=states[1][0], delta_y=states[2][0],
                              d_p=states[busmod.LoopbackBus.LINEAR_ID][0])
    pose = forward_kinematics(params, settled)
    error = math.dist(pose.as_tuple(), (args.x, args.y, args.z))
    sys.stdout.write("# command frames\n" + busmod.frame_dump(frames))
    sys.stdout.write("# state replies\n" + busmod.frame_dump(replies))
    _emit({
        "target_mm": [args.x, args.y, args.z],
        "commanded": {"delta_p_deg": cmd.delta_p, "delta_y_deg": cmd.delta_y,
                      "d_p_mm": cmd.d_p},
        "settled": {"delta_p_deg": settled.delta_p, "delta_y_deg": settled.delta_y,
                    "d_p_mm": settled.d_p},
        "settled_pose_mm": [pose.x, pose.y, pose.z],
        "error_mm": error,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chopkit",
        description="dual-chopstick end effector toolkit")
    parser.add_argument("--config", help="YAML mechanism config (default: built-in)")
    parser.add_argument("--json-errors", action="store_true",
                        help="report domain errors as JSON on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ik", help="tip target -> servo command")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--platform", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("fk", help="servo command -> tip pose")
    p.add_argument("--pitch", type=float, required=True, help="degrees")
    p.add_argument("--yaw", type=float, required=True, help="degrees")
    p.add_argument("--travel", type=float, required=True, help="mm")
    p.add_argument("--platform", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("workspace", help="sample reachability, optionally emit pose pairs")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, nargs=6, metavar=("X0", "X1", "Y0", "Y1", "Z0", "Z1"))
    p.add_argument("--out", required=True, help="sample CSV path")
    p.add_argument("--pairs-out", help="also write commanded/observed pairs CSV")
    p.add_argument("--deadband", type=float, default=0.25,
                   help="synthetic servo deadband, degrees")
    p.add_argument("--platform", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_workspace)

    p = sub.add_parser("hull", help="convex hull of reachable samples")
    p.add_argument("--samples", required=True, help="sample CSV from 'workspace'")
    p.add_argument("--mesh", help="output OFF mesh path")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("validate", help="error report from pose-pair CSV")
    p.add_argument("--pairs", required=True)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ft-sim", help="simulate grip cycles on one material")
    p.add_argument("--stiffness", type=float, required=True, help="N/mm")
    p.add_argument("--cycles", type=int, default=8)
    p.add_argument("--rest-width", type=float, default=30.0)
    p.add_argument("--depth", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="stream CSV path")
    p.add_argument("--closure-out", help="closure CSV path")
    p.set_defaults(func=cmd_ft_sim)

    p = sub.add_parser("stiffness", help="estimate contact stiffness from a stream")
    p.add_argument("--stream", required=True)
    p.add_argument("--closure", required=True)
    p.set_defaults(func=cmd_stiffness)

    p = sub.add_parser("grasp-sim", help="run the grasp trial suite")
    p.add_argument("--items", help="item fixture CSV (default: bundled synthetic set)")
    p.add_argument("--grip-force", type=float, default=graspmod.DEFAULT_GRIP_FORCE_N)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_grasp_sim)

    p = sub.add_parser("bus-demo", help="IK -> frames -> simulated servos -> FK")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--settle", type=float, default=1.0, help="settle time, s")
    p.add_argument("--platform", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_bus_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChopkitError as exc:
        if args.json_errors:
            _emit({"error": type(exc).__name__, "message": str(exc)})
        else:
            print(f"chopkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"chopkit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
