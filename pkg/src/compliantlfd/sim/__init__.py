"""Quasi-static point-tool simulator with rigid surfaces and Coulomb friction."""
from .controller import ControllerState, advance_setpoint, build_stiffness, controller_force
from .dynamics import Contact, solve_single_contact, step
from .environment import (Environment, Funnel, Plane, environment_from_dict, free_space, funnel,
                          load_environment, valley)
from .runs import (ReproductionResult, SimTrace, generate_demonstration, physics_violations, reproduce,
                   simulate_demonstration)
