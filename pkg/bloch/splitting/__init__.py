from .fields import FieldSignal, field_average
from .integrator import SplittingContext, StepPlan, Trajectory, build_context, simulate, strang_step
from .convergence import convergence_order
