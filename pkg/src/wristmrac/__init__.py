"""Neural-network model reference adaptive control of a tendon-driven soft wrist."""

from .beam import BeamParams, TipPose, static_gain, tip_pose
from .config import Config
from .loop import Direction, NNController, PlantModel, SimTrace, run_all_directions, run_nn_mrac
from .lti import LTISystem, TransferFunction, realize
from .metrics import MetricsReport
from .nn import Network, Normalizer, TrainingSet, train_lm

__version__ = "0.1.0"
