"""Learning compliant motion primitives (a desired force direction and 0-2
compliant axes) from position/force demonstrations, plus a quasi-static
contact simulator to generate demonstrations and test reproductions."""
from .compliance import ComplianceResult, ComplianceSpec, learn_compliance, select_model
from .core import MotionModel, MotionSample, Trajectory, load_model, preprocess, read_trajectory_csv, save_model
from .direction import ConstraintSpec, DirectionResult, learn_direction
from .errors import (CompliantLfDError, ConflictingDemonstrationsError, DegenerateConstraintError,
                     NoUsableConstraintsError, TrajectoryError)
from .pipeline import LearnedModel, learn_motion_model

__version__ = "0.1.0"
