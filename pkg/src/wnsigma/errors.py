class InternalConsistencyError(RuntimeError):
    """An identity that must hold by construction failed; indicates a bug, not bad input."""
