"""Builds model objects from a Config and runs each workflow stage.

Every function here is free of file I/O; the CLI handles reading and writing.
"""

import math

import numpy as np

from . import beam, lti, metrics, mrac, nn
from .errors import ConfigError, DomainError
from .loop import Direction, NNController, PlantModel, reference_for, run_all_directions

DATASET_FEATURE_COLUMNS = {"e": "e", "y_ref": "y_model"}


def beam_params(cfg):
    b = cfg["beam"]
    return beam.BeamParams(youngs_modulus=b["E"], area_moment=b["I"], length=b["L"], shear_coeff=b["K"],
                           area=b["A"], shear_modulus=b["G"], curvature_radius=b["R"])


def reference_model(cfg):
    ref = cfg["reference"]
    return lti.realize(lti.TransferFunction(tuple(ref["num"]), tuple(ref["den"])), ref["dt"])


def plant_model(cfg):
    p = cfg["plant"]
    return PlantModel.from_beam(beam_params(cfg), p["zeta"], p["omega_n"], cfg["reference"]["dt"])


def commanded_deflection(cfg, direction=Direction.ULNAR):
    return reference_for(direction, math.radians(cfg["loop"]["angle_deg"]), beam_params(cfg))


def generate_dataset(cfg):
    """MRAC run on the default step command; returns the full record list."""
    refmodel = reference_model(cfg)
    m = cfg["mrac"]
    return mrac.run_mrac(
        plant_model(cfg).system, refmodel, commanded_deflection(cfg), gamma=m["gamma"], duration=m["duration"],
        theta0=m["theta0"], ref_input_scale=1.0 / refmodel.dc_gain(), blowup_limit=m["blowup_limit"],
    )


def training_set(cfg, records):
    """Strided, min-max normalized (features -> force) pairs."""
    features = cfg["nn"]["inputs"]
    unknown = [f for f in features if f not in DATASET_FEATURE_COLUMNS]
    if unknown:
        raise ConfigError(f"unknown network inputs {unknown}; available: {list(DATASET_FEATURE_COLUMNS)}")
    cols = mrac.dataset_arrays(records)
    stride = cfg["train"]["stride"]
    if stride < 1:
        raise ConfigError("train.stride must be >= 1")
    X = np.column_stack([cols[DATASET_FEATURE_COLUMNS[f]] for f in features])[::stride]
    Y = cols["u_force_N"][::stride]
    return nn.TrainingSet.from_raw(X, Y)


def check_layers(cfg):
    layers = tuple(cfg["nn"]["layers"])
    if layers[0] != len(cfg["nn"]["inputs"]) or layers[-1] != 1:
        raise ConfigError(f"nn.layers {layers} must start with {len(cfg['nn']['inputs'])} inputs and end with 1 output")
    return layers


def initial_network(cfg):
    n = cfg["nn"]
    return nn.Network.initialize(check_layers(cfg), seed=n["seed"], output_activation=n["output_activation"])


def train(cfg, data):
    n, t = cfg["nn"], cfg["train"]
    return nn.train_lm(
        initial_network(cfg), data, max_epochs=n["max_epochs"], lambda0=n["lambda0"], lambda_up=n["lambda_up"],
        lambda_down=n["lambda_down"], lambda_max=n["lambda_max"], grad_tol=n["grad_tol"], goal_sse=n["goal_sse"],
        val_fraction=t["val_fraction"], test_fraction=t["test_fraction"], seed=n["seed"],
    )


def controller(cfg, net, normalizer):
    if tuple(net.sizes) != check_layers(cfg):
        raise ConfigError(f"weights have layer sizes {net.sizes}, config expects {tuple(cfg['nn']['layers'])}")
    return NNController(net, normalizer, tuple(cfg["nn"]["inputs"]))


def directions(cfg, override=None):
    name = override or cfg["loop"]["direction"]
    if name == "all":
        return tuple(Direction)
    return (Direction.parse(name),)


def simulate(cfg, ctrl, direction=None, config_digest=""):
    lp = cfg["loop"]
    angle = math.radians(lp["angle_deg"])
    try:
        return run_all_directions(
            ctrl, lambda: plant_model(cfg), lambda: reference_model(cfg), angle, lp["duration"], beam_params(cfg),
            directions=directions(cfg, direction), online=lp["online"], eta=lp["eta"], config_digest=config_digest,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def evaluate(cfg, trace):
    m = cfg["metrics"]
    return metrics.evaluate(trace, band=m["band"], window=m["window"])


def run_pipeline(cfg):
    """dataset -> train -> simulate -> evaluate, all in memory."""
    records = generate_dataset(cfg)
    data = training_set(cfg, records)
    net, report = train(cfg, data)
    traces = simulate(cfg, controller(cfg, net, data.normalizer))
    results = {d: evaluate(cfg, tr) for d, tr in traces.items()}
    return {"records": records, "data": data, "net": net, "report": report, "traces": traces, "metrics": results}
