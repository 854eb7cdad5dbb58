from .linalg import canonical_phase, fidelity, hermitize, trace_norm
from .output import write_rows

__all__ = ['canonical_phase', 'fidelity', 'hermitize', 'trace_norm', 'write_rows']
