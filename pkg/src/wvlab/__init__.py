"""wvlab: exact simulation of quantum measurement sequences with post-selection.

The package computes pointer readings, post-selection probabilities and
state-change metrics for impulsive system-pointer couplings of arbitrary
strength, entirely in closed form, and verifies them against an
independent position-grid oracle.
"""

from wvlab.qcore import (
    BlochVector,
    DensityMatrix,
    Observable,
    PureState,
    bloch_vector,
    from_bloch_vector,
    identification_probability,
    trace_distance,
    uhlmann_fidelity,
)
from wvlab.pointer import (
    FrameOperator,
    GaussianPointer,
    PointerFrame,
    fidelity_with_initial,
    frame_position_mean,
    frame_to_grid,
    overlap_kernel,
)
from wvlab.engine import (
    JointState,
    MeasurementSetup,
    PostSelectionError,
    abl_expectation,
    conditional_pointer_shift,
    evolve,
    nonselective_final,
    post_select,
    reduced_pointer,
    reduced_system,
    weak_value,
)
from wvlab.oracle import DenseJoint, Grid, build_joint, convergence_report, oracle_observables

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "DenseJoint",
    "DensityMatrix",
    "FrameOperator",
    "GaussianPointer",
    "Grid",
    "JointState",
    "MeasurementSetup",
    "Observable",
    "PointerFrame",
    "PostSelectionError",
    "PureState",
    "abl_expectation",
    "bloch_vector",
    "build_joint",
    "conditional_pointer_shift",
    "convergence_report",
    "evolve",
    "fidelity_with_initial",
    "frame_position_mean",
    "frame_to_grid",
    "from_bloch_vector",
    "identification_probability",
    "nonselective_final",
    "oracle_observables",
    "overlap_kernel",
    "post_select",
    "reduced_pointer",
    "reduced_system",
    "trace_distance",
    "uhlmann_fidelity",
    "weak_value",
]
