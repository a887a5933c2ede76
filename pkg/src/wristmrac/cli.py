"""Command-line entry point: dataset -> train -> simulate -> evaluate.

Exit codes: 0 success, 1 contract or metric failure, 2 usage or parse error.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import gradcheck, metrics, mrac, nn, pipeline
from .config import Config
from .errors import ConfigError, DivergenceError, DomainError, ParseError, TrainingError
from .loop import Direction, read_trace, write_trace

log = logging.getLogger("wristmrac")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PLOT_STRIDE = 10


def _digest_comment(cfg, **extra):
    parts = [f"config_digest={cfg.digest()}"] + [f"{k}={v}" for k, v in extra.items()]
    return " ".join(parts)


def _out(args, name):
    return os.path.join(args.out, name)


def cmd_dataset(cfg, args):
    try:
        records = pipeline.generate_dataset(cfg)
    except DivergenceError as exc:
        log.error("MRAC diverged: %s (%d records before failure)", exc, len(exc.partial or []))
        return EXIT_FAIL
    path = args.output or _out(args, "dataset.csv")
    mrac.export_dataset(records, path, comment=_digest_comment(cfg, dt=cfg["reference"]["dt"]))
    print(f"wrote {len(records)} records to {path}")
    return EXIT_OK


def cmd_train(cfg, args):
    records = mrac.read_dataset(args.dataset or _out(args, "dataset.csv"))
    data = pipeline.training_set(cfg, records)
    net, report = pipeline.train(cfg, data)
    reg = nn.evaluate_regression(net, data)
    weights = args.weights_out or _out(args, "weights.txt")
    comment = _digest_comment(cfg)
    nn.save_weights(net, weights, comment=comment)
    norm_path = os.path.join(os.path.dirname(weights) or ".", "normalizer.json")
    with open(norm_path, "w") as fh:
        json.dump({"config_digest": cfg.digest(), "inputs": cfg["nn"]["inputs"], **data.normalizer.to_dict()},
                  fh, indent=2)
        fh.write("\n")
    summary = {
        "config_digest": cfg.digest(),
        "hidden_layers": len(net.sizes) - 2,
        "layers": list(net.sizes),
        "epochs": report.epochs,
        "stop_reason": report.stop_reason,
        "gradient": report.gradient_norm,
        "mu": report.final_lambda,
        "training_loss": report.train_mse,
        "validation_loss": report.val_mse,
        "test_loss": report.test_mse,
        "r_value": reg["r_value"],
    }
    with open(_out(args, "train_report.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    for key, value in summary.items():
        print(f"{key:>16}: {value}")
    return EXIT_OK


def _load_controller(cfg, args):
    weights = args.weights or _out(args, "weights.txt")
    norm_path = args.normalizer or os.path.join(os.path.dirname(weights) or ".", "normalizer.json")
    net = nn.load_weights(weights, cfg["nn"]["output_activation"])
    with open(norm_path) as fh:
        try:
            normalizer = nn.Normalizer.from_dict(json.load(fh))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"malformed normalizer ({exc})", norm_path) from None
    return pipeline.controller(cfg, net, normalizer)


def cmd_simulate(cfg, args):
    ctrl = _load_controller(cfg, args)
    try:
        traces = pipeline.simulate(cfg, ctrl, direction=args.direction, config_digest=cfg.digest())
    except DivergenceError as exc:
        log.error("closed loop diverged: %s", exc)
        return EXIT_FAIL
    dt = cfg["reference"]["dt"]
    plot_rows = []
    for direction, trace in traces.items():
        path = _out(args, f"trace_{direction.value}.csv")
        write_trace(trace, path, comment=_digest_comment(cfg, direction=direction.value, dt=dt))
        if trace.slack:
            log.warning("%s: controller requested negative force; tendons went slack", direction.value)
        print(f"wrote {path}")
        for k in range(0, len(trace), PLOT_STRIDE):
            plot_rows.append((direction.value, trace.t[k], trace.y_ref[k], trace.y_plant[k], trace.e[k]))
    plot_path = _out(args, "plot_data.csv")
    with open(plot_path, "w") as fh:
        fh.write(f"# {_digest_comment(cfg, stride=PLOT_STRIDE)}\n")
        fh.write("direction,t,y_ref,y_plant,e\n")
        for name, *vals in plot_rows:
            fh.write(name + "," + ",".join(repr(float(v)) for v in vals) + "\n")
    print(f"wrote {plot_path}")
    return EXIT_OK


def _fmt_metric(value):
    return "not_settled" if math.isinf(value) else f"{value:.6g}"


def cmd_evaluate(cfg, args):
    band, window = cfg["metrics"]["band"], cfg["metrics"]["window"]
    rows = []
    for path in args.traces:
        trace = read_trace(path)
        try:
            report = metrics.evaluate(trace, band=band, window=window)
        except DomainError as exc:
            raise ParseError(str(exc), path) from None
        name = trace.direction or os.path.splitext(os.path.basename(path))[0]
        rows.append((name, report))
    print("direction,rmse_m,settling_s,ss_error_m")
    for name, m in rows:
        print(f"{name},{m.rmse:.6g},{_fmt_metric(m.settling_time)},{m.steady_state_error:.6g}")
    if len(rows) > 1:
        avg = metrics.average(m for _, m in rows)
        print(f"average,{avg.rmse:.6g},{_fmt_metric(avg.settling_time)},{avg.steady_state_error:.6g}")
    return EXIT_OK if all(m.settled for _, m in rows) else EXIT_FAIL


def cmd_gradcheck(cfg, args):
    if args.weights:
        net = nn.load_weights(args.weights, cfg["nn"]["output_activation"])
    else:
        net = pipeline.initial_network(cfg)
    rng = np.random.default_rng(cfg["nn"]["seed"])
    inputs = rng.uniform(-1.0, 1.0, size=(args.draws, net.n_inputs))
    err = gradcheck.check(net, inputs)
    ok = net.is_finite() and err < args.tol
    print(f"gradcheck {'pass' if ok else 'fail'}: max relative error {err:.3e} (tol {args.tol:.1e}, "
          f"{args.draws} inputs, layers {' '.join(map(str, net.sizes))})")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="config file (INI sections)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override nn.seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")

    parser = argparse.ArgumentParser(prog="wristmrac", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="config file (INI sections)")
    parser.add_argument("--seed", type=int, default=None, help="override nn.seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dataset", parents=[common], help="run the MIT-rule MRAC and write its dataset")
    p.add_argument("--output", help="dataset path (default OUT/dataset.csv)")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", parents=[common], help="train the network with Levenberg-Marquardt")
    p.add_argument("--dataset", help="dataset CSV (default OUT/dataset.csv)")
    p.add_argument("--weights-out", help="weights file (default OUT/weights.txt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", parents=[common], help="closed-loop simulation with the trained network")
    p.add_argument("--weights", help="weights file (default OUT/weights.txt)")
    p.add_argument("--normalizer", help="normalizer JSON (default next to the weights)")
    p.add_argument("--direction", choices=["all"] + [d.value for d in Direction])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", parents=[common], help="RMSE, settling time and steady-state error")
    p.add_argument("traces", nargs="+")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gradcheck", parents=[common], help="compare the Jacobian with finite differences")
    p.add_argument("--weights", help="check this weights file instead of a freshly initialized network")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--draws", type=int, default=100)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = Config.load(args.config) if args.config else Config()
        if args.seed is not None:
            cfg.set("nn", "seed", args.seed)
        os.makedirs(args.out, exist_ok=True)
        return args.func(cfg, args)
    except (ParseError, ConfigError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (DomainError, TrainingError, DivergenceError) as exc:
        log.error("%s", exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
