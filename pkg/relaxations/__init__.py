from .relaxation import Relaxation, relax, relax_system
from .drop import DropRelaxation
from .envelope import EnvelopeRelaxation
from .corner import CornerRelaxation
