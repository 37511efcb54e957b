from bloch.core.system import RelaxationModel
from .relaxation import RelaxNutPropagator, build_relax_nut, relax_nut_half_step
from .interpolation import canonical3_coefficients, cayley, newton_divided_differences, newton_polynomial
from .strategies import build_strategy, conjugation_matrix, liouville_step, METHODS
from .nsfd import NsfdReport, nsfd_report
