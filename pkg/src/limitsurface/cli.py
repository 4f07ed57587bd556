"""Command-line entry point: ``limitsurface <command> ...``.

Exit status: 0 on success, 2 on usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import LimitSurfaceError
from .identify import DEFAULT_EPSILON, DEFAULT_EPSILON_GRID, DEFAULT_GRID, KINDS, FitConfig, fit
from .inversion import invert
from .metrics import angular_errors
from .oracle import add_noise, gen_dataset, gen_legged_support, gen_uniform_support, split_dataset
from .push import COR, PushContact, classify_cors, sample_cors
from .sliding import SlideState, simulate_sliding
from .study import StudyConfig, run_study
from .wrench import BodyParams, GeneralizedVelocity, PoseSE2, unit

log = logging.getLogger("limitsurface")


def _floats(n):
    def parse(text):
        try:
            vals = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return vals

    return parse


def _epsilons(text):
    return _floats(None)(text) if text.strip() else ()


def _grid(text):
    vals = _floats(None)(text)
    return tuple((a, b) for a in vals for b in vals)


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    if args.support == "legged":
        cfg = gen_legged_support(rng, mu=args.mu)
        protocol = "legged"
    else:
        cfg = gen_uniform_support(args.support, args.points or (360 if args.support == "ring" else 400), mu=args.mu)
        protocol = "uniform"
    ds = gen_dataset(cfg, protocol, args.n, rng, seed=args.seed)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    if args.split:
        plan = split_dataset(ds, rng=rng, train_sizes=(1,))
        parts = {
            "train": add_noise(ds.subset(plan.pool), args.noise, rng, seed=args.seed),
            "val": add_noise(ds.subset(plan.validation), args.noise, rng, seed=args.seed),
            "test": ds.subset(plan.test),
        }
        for name, part in parts.items():
            io.write_dataset(part, out / f"{name}.csv")
    else:
        ds = add_noise(ds, args.noise, rng, seed=args.seed)
        io.write_dataset(ds, out / "dataset.csv")
    return 0


def cmd_fit(args):
    train = io.read_dataset(args.train)
    val = io.read_dataset(args.val) if args.val else None
    grid = None if args.no_cv else (args.grid or DEFAULT_GRID)
    config = FitConfig(kind=args.kind, eta1=args.eta1, eta2=args.eta2, epsilon=args.epsilon, cv_grid=grid,
                       epsilon_grid=None if args.no_cv else args.epsilon_grid)
    res = fit(train, val, config)
    io.write_model(res.model, args.output)
    print(json.dumps({"eta": list(res.eta), "train_error_deg": res.train_error,
                      "validation_error_deg": res.validation_error, **res.diagnostics}, sort_keys=True))
    return 0


def cmd_eval(args):
    model = io.read_model(args.model)
    ds = io.read_dataset(args.data)
    deg, undefined = angular_errors(model, ds.F, ds.V)
    print(json.dumps({"delta_deg": float(deg.mean()), "n": len(ds), "undefined": int(undefined.sum())}))
    return 0


def cmd_invert(args):
    model = io.read_model(args.model)
    V = unit(io.read_columns(args.input, ("vx", "vy", "vz")))
    F = np.array([invert(model, v) for v in V])
    if args.physical:
        F = model.physical_load(F)
    io.write_rows(args.output, ("fx", "fy", "fz"), F.tolist())
    return 0


def cmd_stable(args):
    model = io.read_model(args.model)
    contact = PushContact(args.p1, args.p2, tuple(unit(args.normal)), args.mu_contact)
    if args.cors:
        data = io.read_columns(args.cors, ("cx", "cy"))
        cors = [COR(float(x), float(y), None) for x, y in data]
    else:
        cors = sample_cors(np.random.default_rng(args.seed), args.n_cors, args.half_width)
    rows = classify_cors(model, contact, cors, args.rho)
    io.write_rows(args.output, ("cx", "cy", "sense", "stable", "margin"),
                  [(float(x), float(y), s, int(ok), float(m)) for x, y, s, ok, m in rows])
    return 0


def cmd_simulate(args):
    model = io.read_model(args.model)
    body = BodyParams(args.mass, args.inertia, args.rho, args.mu, args.gravity)
    vx, vy, omega = args.v0
    state = SlideState(PoseSE2(*args.pose), GeneralizedVelocity(vx, vy, omega * body.rho))
    traj = simulate_sliding(model, body, state, step=args.dt, units=args.units, coriolis=args.coriolis)
    traj.write_csv(args.output)
    return 0


def cmd_study(args):
    cfg = StudyConfig(
        support=args.support,
        n_trials=args.trials,
        sigma=args.sigma,
        seed=args.seed,
        train_sizes=tuple(int(s) for s in args.sizes),
        epsilon=args.epsilon,
        epsilon_grid=args.epsilon_grid or None,
    )
    report = run_study(cfg, workers=args.workers)
    Path(args.output).write_text(report.dumps() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="limitsurface", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a simulated force/motion dataset")
    g.add_argument("--support", choices=("legged", "ring", "square"), required=True)
    g.add_argument("--n", type=int, default=150)
    g.add_argument("--points", type=int, help="support point count for ring/square")
    g.add_argument("--mu", type=float, default=1.0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--split", action="store_true", help="write train/val/test (noise on train and val only)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fit", help="fit a model to a dataset")
    f.add_argument("--kind", choices=KINDS, default="poly4-cvx")
    f.add_argument("--train", required=True)
    f.add_argument("--val")
    f.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    f.add_argument("--epsilon-grid", type=_floats(None),
                   help="comma-separated convexity margins to cross-validate (overrides --epsilon)")
    f.add_argument("--eta1", type=float, default=1.0)
    f.add_argument("--eta2", type=float, default=1.0)
    f.add_argument("--grid", type=_grid, help="comma-separated eta values, crossed for (eta1, eta2)")
    f.add_argument("--no-cv", action="store_true", help="use --eta1/--eta2 without cross-validation")
    f.add_argument("--seed", type=int, default=0, help="unused; fitting is deterministic")
    f.add_argument("-o", "--output", required=True)
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="mean angular error of a model on a dataset")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("invert", help="map unit twists (vx,vy,vz CSV) to loads")
    i.add_argument("--model", required=True)
    i.add_argument("--input", required=True)
    i.add_argument("--physical", action="store_true", help="multiply by the model's load_scale")
    i.add_argument("-o", "--output", required=True)
    i.set_defaults(func=cmd_invert)

    s = sub.add_parser("stable", help="classify two-point pushes about CORs")
    s.add_argument("--model", required=True)
    s.add_argument("--p1", type=_floats(2), required=True)
    s.add_argument("--p2", type=_floats(2), required=True)
    s.add_argument("--normal", type=_floats(2), required=True)
    s.add_argument("--mu-contact", type=float, default=1.0)
    s.add_argument("--rho", type=float, help="defaults to the model's rho")
    s.add_argument("--cors", help="CSV with cx,cy columns; otherwise sample --n-cors")
    s.add_argument("--n-cors", type=int, default=60)
    s.add_argument("--half-width", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_stable)

    m = sub.add_parser("simulate", help="free sliding simulation")
    m.add_argument("--model", required=True)
    m.add_argument("--mass", type=float, required=True)
    m.add_argument("--inertia", type=float, required=True)
    m.add_argument("--rho", type=float, help="defaults to the radius of gyration")
    m.add_argument("--mu", type=float, default=1.0)
    m.add_argument("--gravity", type=float, default=9.81)
    m.add_argument("--v0", type=_floats(3), required=True, help="vx,vy,omega (body frame)")
    m.add_argument("--pose", type=_floats(3), default=(0.0, 0.0, 0.0))
    m.add_argument("--dt", type=float, default=1e-3)
    m.add_argument("--units", choices=("normalized", "physical"), default="normalized")
    m.add_argument("--coriolis", action="store_true")
    m.add_argument("--seed", type=int, default=0, help="unused; simulation is deterministic")
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=cmd_simulate)

    st = sub.add_parser("study", help="run the simulation study")
    st.add_argument("--support", choices=("legged", "ring", "square"), required=True)
    st.add_argument("--trials", type=int, default=50)
    st.add_argument("--sigma", type=float, default=0.1)
    st.add_argument("--sizes", type=_floats(None), default=(7, 15, 22, 45))
    st.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="used with --epsilon-grid ''")
    st.add_argument("--epsilon-grid", type=_epsilons, default=DEFAULT_EPSILON_GRID,
                    help="comma-separated margins to cross-validate; empty string fixes --epsilon")
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("-o", "--output", required=True)
    st.set_defaults(func=cmd_study)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (LimitSurfaceError, OSError, ValueError) as exc:
        print(f"limitsurface {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
